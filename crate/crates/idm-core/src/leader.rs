//! Leader acceleration profiles.

use crate::accel::free_flow_accel;
use crate::params::ModelParams;

/// Acceleration profile of the leading vehicle.
///
/// Admissible profiles keep the leader velocity nonnegative on the whole
/// horizon; the integrator checks this along the run and aborts with
/// `Termination::LeaderVelocityNegative` if it is violated.
#[derive(Debug, Clone, PartialEq)]
pub enum LeaderProfile {
    /// Constant acceleration `u`.
    ConstantAccel { u: f64 },
    /// The leader drives the free-flow law `a (1 - (|v|/v_free)^delta)`.
    FreeFlow,
    /// Piecewise-constant schedule of `(t_start, accel)` entries, sorted by
    /// `t_start`; the acceleration is 0 before the first entry and each entry
    /// holds until the next one.
    PiecewiseConstant { schedule: Vec<(f64, f64)> },
    /// Stop-and-go wave: `amplitude` while `sin(t/angular_divisor)` is at or
    /// above `threshold`, `-amplitude` while at or below `-threshold`, zero
    /// in between.
    StopAndGoSine {
        amplitude: f64,
        threshold: f64,
        angular_divisor: f64,
    },
}

impl LeaderProfile {
    /// Stop-and-go profile with the default threshold 0.8 and divisor 4.
    pub fn stop_and_go(amplitude: f64) -> Self {
        LeaderProfile::StopAndGoSine {
            amplitude,
            threshold: 0.8,
            angular_divisor: 4.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LeaderProfile::ConstantAccel { .. } => "constant-accel",
            LeaderProfile::FreeFlow => "free-flow",
            LeaderProfile::PiecewiseConstant { .. } => "piecewise-constant",
            LeaderProfile::StopAndGoSine { .. } => "stop-and-go-sine",
        }
    }

    /// Leader acceleration at time `t` with current leader velocity `v_l`.
    ///
    /// Piecewise profiles are right-continuous: at a switching time the new
    /// piece applies.
    pub fn accel(&self, p: &ModelParams, t: f64, v_l: f64) -> f64 {
        match self {
            LeaderProfile::ConstantAccel { u } => *u,
            LeaderProfile::FreeFlow => free_flow_accel(p, v_l),
            LeaderProfile::PiecewiseConstant { schedule } => {
                let mut u = 0.0;
                for &(start, accel) in schedule {
                    if t >= start {
                        u = accel;
                    } else {
                        break;
                    }
                }
                u
            }
            LeaderProfile::StopAndGoSine {
                amplitude,
                threshold,
                angular_divisor,
            } => {
                let s = (t / angular_divisor).sin();
                if s >= *threshold {
                    *amplitude
                } else if s <= -*threshold {
                    -*amplitude
                } else {
                    0.0
                }
            }
        }
    }

    /// Whether the acceleration depends on the leader velocity (and must be
    /// re-evaluated at every integrator stage) or is constant between
    /// breakpoints (and can be frozen per step).
    pub fn is_velocity_coupled(&self) -> bool {
        matches!(self, LeaderProfile::FreeFlow)
    }

    /// Times in `(0, horizon)` at which the profile jumps. The integrator
    /// never steps across a breakpoint; it lands on it exactly, so each step
    /// sees a smooth right-hand side.
    pub fn breakpoints(&self, horizon: f64) -> Vec<f64> {
        match self {
            LeaderProfile::ConstantAccel { .. } | LeaderProfile::FreeFlow => Vec::new(),
            LeaderProfile::PiecewiseConstant { schedule } => schedule
                .iter()
                .map(|&(start, _)| start)
                .filter(|&t| t > 0.0 && t < horizon)
                .collect(),
            LeaderProfile::StopAndGoSine {
                threshold,
                angular_divisor,
                ..
            } => {
                if !(*threshold > 0.0 && *threshold < 1.0) {
                    return Vec::new();
                }
                let c = *angular_divisor;
                let base = threshold.asin();
                let period = 2.0 * std::f64::consts::PI;
                // sin crosses +-threshold four times per period
                let offsets = [
                    base,
                    std::f64::consts::PI - base,
                    std::f64::consts::PI + base,
                    2.0 * std::f64::consts::PI - base,
                ];
                let mut out = Vec::new();
                let mut k = 0.0;
                'outer: loop {
                    for off in offsets {
                        let t = c * (off + k * period);
                        if t >= horizon {
                            break 'outer;
                        }
                        if t > 0.0 {
                            out.push(t);
                        }
                    }
                    k += 1.0;
                }
                out
            }
        }
    }
}
