//! Vehicle and platoon state.

/// Discrete mode of one vehicle. Only meaningful for the discontinuous
/// variant; every other variant keeps vehicles in `Moving` permanently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Moving,
    Stopped,
}

/// Position and velocity of one vehicle.
///
/// `mode == Stopped` implies `v == 0` exactly; the integrator pins the
/// velocity when it latches the stop branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub x: f64,
    pub v: f64,
    pub mode: Mode,
}

impl VehicleState {
    pub fn new(x: f64, v: f64) -> Self {
        VehicleState {
            x,
            v,
            mode: Mode::Moving,
        }
    }
}

/// Snapshot of the whole platoon at one time.
///
/// Vehicles are ordered downstream to upstream: index 0 is the leader and
/// each vehicle follows the one before it. (The accompanying text and the
/// CSV headers use 1-based labels, so `x_1` is the leader.)
#[derive(Debug, Clone, PartialEq)]
pub struct PlatoonState {
    pub t: f64,
    pub vehicles: Vec<VehicleState>,
}

impl PlatoonState {
    pub fn new(t: f64, vehicles: Vec<VehicleState>) -> Self {
        PlatoonState { t, vehicles }
    }

    /// Two-vehicle convenience constructor: leader at `x_l` with velocity
    /// `v_l`, follower at `x` with velocity `v`.
    pub fn pair(x_l: f64, v_l: f64, x: f64, v: f64) -> Self {
        PlatoonState {
            t: 0.0,
            vehicles: vec![VehicleState::new(x_l, v_l), VehicleState::new(x, v)],
        }
    }

    pub fn len(&self) -> usize {
        self.vehicles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vehicles.is_empty()
    }

    /// Net bumper-to-bumper gap in front of vehicle `i` (i >= 1).
    pub fn net_gap(&self, i: usize, l: f64) -> f64 {
        self.vehicles[i - 1].x - self.vehicles[i].x - l
    }

    /// All vehicle states are finite numbers.
    pub fn is_finite(&self) -> bool {
        self.vehicles.iter().all(|v| v.x.is_finite() && v.v.is_finite())
    }
}
