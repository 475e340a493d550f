//! Model parameters and variant selection.

/// The seven IDM parameters.
///
/// All quantities are SI: accelerations in m/s^2, velocities in m/s, lengths
/// in m, the headway in s. `delta` is the dimensionless acceleration exponent
/// and must exceed one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Maximum vehicle acceleration `a`.
    pub a: f64,
    /// Comfortable braking deceleration `b`.
    pub b: f64,
    /// Desired (free-flow) velocity.
    pub v_free: f64,
    /// Desired time headway `tau`.
    pub tau: f64,
    /// Minimum net spacing `s0`.
    pub s0: f64,
    /// Vehicle length `l`.
    pub l: f64,
    /// Acceleration exponent `delta` (> 1).
    pub delta: f64,
}

impl ModelParams {
    /// The textbook parameter set (desired velocity 120 km/h).
    pub fn table1() -> Self {
        ModelParams {
            a: 0.73,
            b: 1.67,
            v_free: 120.0 / 3.6,
            tau: 1.6,
            s0: 2.0,
            l: 5.0,
            delta: 4.0,
        }
    }
}

/// Which acceleration law the followers obey.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    /// The unmodified IDM acceleration.
    Classic,
    /// `max{v, 0}` substituted for the velocity everywhere; kinematic
    /// velocity projected as well.
    VelocityProjected,
    /// Velocity projection plus a deceleration floor at `-a_min`.
    AccelerationProjected { a_min: f64 },
    /// Interaction term scaled by the saturation `h(v)` so it vanishes at
    /// standstill.
    VelocityRegularized { eps_v: f64 },
    /// Interaction term scaled by the distance saturation `h~(gap)`.
    DistanceRegularized { eps_d: f64 },
    /// Piecewise law that holds a stopped vehicle at rest while the net gap
    /// is below `s0`.
    Discontinuous,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Classic => "classic",
            Variant::VelocityProjected => "velocity-projected",
            Variant::AccelerationProjected { .. } => "acceleration-projected",
            Variant::VelocityRegularized { .. } => "velocity-regularized",
            Variant::DistanceRegularized { .. } => "distance-regularized",
            Variant::Discontinuous => "discontinuous",
        }
    }
}

/// Variant selection plus the optional signed power term.
///
/// With `signed_power_term` the free-flow part uses `sgn(v)(|v|/v_free)^delta`
/// instead of `(|v|/v_free)^delta`, so it counteracts negative velocities
/// rather than reinforcing them. `sgn(0) = 0`, which keeps the standstill
/// acceleration identical for both options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantConfig {
    pub variant: Variant,
    pub signed_power_term: bool,
}

impl VariantConfig {
    pub fn classic() -> Self {
        VariantConfig {
            variant: Variant::Classic,
            signed_power_term: false,
        }
    }

    pub fn new(variant: Variant) -> Self {
        VariantConfig {
            variant,
            signed_power_term: false,
        }
    }
}

impl Default for VariantConfig {
    fn default() -> Self {
        Self::classic()
    }
}
