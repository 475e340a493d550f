//! Right-hand side of the platoon ODE system and the hybrid mode logic.

use crate::accel::{idm_accel, variant_accel, AccelInput};
use crate::leader::LeaderProfile;
use crate::params::{ModelParams, Variant};
use crate::scenario::Scenario;
use crate::state::{Mode, PlatoonState, VehicleState};

/// One right-hand-side evaluation of the platoon system.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsEvaluation {
    /// Per-vehicle `(dx/dt, dv/dt)`, leader first.
    pub derivatives: Vec<(f64, f64)>,
    /// Modes in effect during the evaluation.
    pub active_modes: Vec<Mode>,
    /// False when a follower/leader pair left the admissible set (net gap
    /// not positive) or an acceleration came out non-finite. Signaled
    /// in-band so the integrator can reject the step instead of erroring.
    pub domain_ok: bool,
}

/// Leader acceleration for `profile` at time `t` with leader velocity `v_l`.
pub fn leader_accel(p: &ModelParams, profile: &LeaderProfile, t: f64, v_l: f64) -> f64 {
    profile.accel(p, t, v_l)
}

/// Evaluate the platoon right-hand side at `state`.
///
/// The leader integrates `dx/dt = v_l`, `dv/dt = u_lead(t)`; follower `i`
/// couples only to vehicle `i - 1`. The kinematic velocity is `max{v, 0}`
/// for the projected variants and exactly zero for stopped vehicles of the
/// discontinuous variant.
pub fn eval_rhs(s: &Scenario, state: &PlatoonState) -> RhsEvaluation {
    eval_rhs_frozen(s, state, None)
}

/// Same as [`eval_rhs`] but with the leader acceleration optionally frozen.
///
/// The integrator freezes `u_lead` per step for profiles that are constant
/// between breakpoints, so that stage evaluations landing exactly on a
/// profile switch stay inside the step's smooth piece.
pub(crate) fn eval_rhs_frozen(
    s: &Scenario,
    state: &PlatoonState,
    frozen_leader_u: Option<f64>,
) -> RhsEvaluation {
    let n = state.vehicles.len();
    let modes: Vec<Mode> = state.vehicles.iter().map(|v| v.mode).collect();
    let y = flatten(state);
    let mut out = vec![0.0; 2 * n];
    let domain_ok = flat_rhs(s, &modes, frozen_leader_u, state.t, &y, &mut out);
    RhsEvaluation {
        derivatives: (0..n).map(|i| (out[2 * i], out[2 * i + 1])).collect(),
        active_modes: modes,
        domain_ok,
    }
}

/// Flatten a platoon state to `[x_1, v_1, x_2, v_2, ...]`.
pub(crate) fn flatten(state: &PlatoonState) -> Vec<f64> {
    let mut y = Vec::with_capacity(2 * state.vehicles.len());
    for v in &state.vehicles {
        y.push(v.x);
        y.push(v.v);
    }
    y
}

/// Rebuild a platoon state from the flat vector and the discrete modes.
pub(crate) fn unflatten(t: f64, y: &[f64], modes: &[Mode]) -> PlatoonState {
    let vehicles = modes
        .iter()
        .enumerate()
        .map(|(i, &mode)| VehicleState {
            x: y[2 * i],
            v: y[2 * i + 1],
            mode,
        })
        .collect();
    PlatoonState { t, vehicles }
}

/// Allocation-free right-hand side on the flat state vector. Returns false
/// when a pair left the admissible set or an acceleration was non-finite.
pub(crate) fn flat_rhs(
    s: &Scenario,
    modes: &[Mode],
    frozen_leader_u: Option<f64>,
    t: f64,
    y: &[f64],
    out: &mut [f64],
) -> bool {
    let p = &s.params;
    let n = modes.len();
    let mut domain_ok = true;

    let v_l = y[1];
    out[0] = v_l;
    out[1] = frozen_leader_u.unwrap_or_else(|| s.leader.accel(p, t, v_l));

    let projected_kinematics = matches!(
        s.variant.variant,
        Variant::VelocityProjected | Variant::AccelerationProjected { .. }
    );

    for i in 1..n {
        if modes[i] == Mode::Stopped {
            out[2 * i] = 0.0;
            out[2 * i + 1] = 0.0;
            continue;
        }
        let input = AccelInput {
            x: y[2 * i],
            v: y[2 * i + 1],
            x_l: y[2 * (i - 1)],
            v_l: y[2 * (i - 1) + 1],
        };
        let dv = match variant_accel(p, &s.variant, input, modes[i]) {
            Ok(a) if a.is_finite() => a,
            _ => {
                domain_ok = false;
                0.0
            }
        };
        out[2 * i] = if projected_kinematics {
            input.v.max(0.0)
        } else {
            input.v
        };
        out[2 * i + 1] = dv;
    }

    domain_ok
}

/// Apply the discontinuous variant's mode transitions at an event point.
///
/// Moving -> Stopped when the velocity has reached zero with a net gap below
/// `s0` (the velocity is pinned to exactly zero). Stopped -> Moving when the
/// gap has reached `s0` and the wake-up acceleration is strictly positive,
/// which happens as the gap strictly exceeds `s0`. Every other variant
/// returns the state unchanged.
pub fn update_modes(s: &Scenario, state: &PlatoonState) -> PlatoonState {
    if s.variant.variant != Variant::Discontinuous {
        return state.clone();
    }
    let p = &s.params;
    let mut vehicles: Vec<VehicleState> = state.vehicles.clone();
    for i in 1..vehicles.len() {
        let gap = vehicles[i - 1].x - vehicles[i].x - p.l;
        match vehicles[i].mode {
            Mode::Moving => {
                if vehicles[i].v <= 0.0 && gap < p.s0 {
                    vehicles[i].mode = Mode::Stopped;
                    vehicles[i].v = 0.0;
                }
            }
            Mode::Stopped => {
                if gap >= p.s0 {
                    let wake = idm_accel(
                        p,
                        AccelInput {
                            x: vehicles[i].x,
                            v: 0.0,
                            x_l: vehicles[i - 1].x,
                            v_l: vehicles[i - 1].v,
                        },
                        s.variant.signed_power_term,
                    )
                    .unwrap_or(0.0);
                    if wake > 0.0 {
                        vehicles[i].mode = Mode::Moving;
                        vehicles[i].v = 0.0;
                    }
                }
            }
        }
    }
    PlatoonState {
        t: state.t,
        vehicles,
    }
}
