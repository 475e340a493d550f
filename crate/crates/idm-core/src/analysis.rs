//! Theoretical bounds, trajectory metrics, and run classification.

use crate::params::{ModelParams, Variant};
use crate::scenario::{InvalidScenario, Scenario};
use crate::solver::{integrate, Termination, Trajectory};
use crate::state::{Mode, PlatoonState};
use thiserror::Error;

/// Safe-distance and velocity bounds derived from the model parameters and
/// the initial datum.
///
/// Two versions of the guaranteed minimum gap are reported because the
/// source material states them inconsistently (a factor-8 expression versus
/// a square root of a factor-4 expression); consumers that need a guaranteed
/// bound should use [`TheoreticalBounds::eps0_star_min`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoreticalBounds {
    /// Velocity cap `max{v0, v_free}` (largest follower initial velocity).
    pub v_max: f64,
    /// `delta* = (-3 v_max^2 + sqrt(9 v_max^4 + 4 a^2 s0^2)) / (2a)`.
    pub delta_star: f64,
    /// Statement version: `a s0^2 delta* / (8 (a delta* + 2 v_max^2))`.
    pub eps0_star: f64,
    /// Proof version: `sqrt(a s0^2 delta* / (4 (a delta* + 2 v_max^2)))`.
    pub eps0_star_proof_variant: f64,
    /// `s0 - (v0 - v_l0)^2 / (2a) > 0` for the first pair.
    pub safe_distancing_ok: bool,
    /// `s0 <= eps0_star` (statement version).
    pub global_wellposed_ok: bool,
}

impl TheoreticalBounds {
    /// The conservative guaranteed gap bound: the smaller of the two
    /// published expressions.
    pub fn eps0_star_min(&self) -> f64 {
        self.eps0_star.min(self.eps0_star_proof_variant)
    }
}

/// Bounds from parameters and initial datum, with the velocity cap taken
/// over the follower initial velocities and the desired velocity.
pub fn compute_bounds(p: &ModelParams, initial: &PlatoonState) -> TheoreticalBounds {
    let v0_max = initial
        .vehicles
        .iter()
        .skip(1)
        .map(|v| v.v)
        .fold(0.0_f64, f64::max);
    bounds_with_vmax(p, initial, p.v_free.max(v0_max))
}

/// Bounds for a scenario. For the acceleration-projected variant the
/// velocity is not capped by `max{v0, v_free}` (only by `v0 + a T`), so the
/// cap used for bound evaluation is enlarged accordingly.
pub fn compute_bounds_for_scenario(s: &Scenario) -> TheoreticalBounds {
    let v0_max = s
        .initial
        .vehicles
        .iter()
        .skip(1)
        .map(|v| v.v)
        .fold(0.0_f64, f64::max);
    let v_max = match s.variant.variant {
        Variant::AccelerationProjected { .. } => {
            s.params.v_free.max(v0_max + s.params.a * s.horizon)
        }
        _ => s.params.v_free.max(v0_max),
    };
    bounds_with_vmax(&s.params, &s.initial, v_max)
}

fn bounds_with_vmax(p: &ModelParams, initial: &PlatoonState, v_max: f64) -> TheoreticalBounds {
    let a = p.a;
    let s0 = p.s0;
    let v2 = v_max * v_max;
    let delta_star = (-3.0 * v2 + (9.0 * v2 * v2 + 4.0 * a * a * s0 * s0).sqrt()) / (2.0 * a);
    let denom = a * delta_star + 2.0 * v2;
    let eps0_star = a * s0 * s0 * delta_star / (8.0 * denom);
    let eps0_star_proof_variant = (a * s0 * s0 * delta_star / (4.0 * denom)).sqrt();

    let safe_distancing_ok = if initial.vehicles.len() >= 2 {
        let dv = initial.vehicles[1].v - initial.vehicles[0].v;
        s0 - dv * dv / (2.0 * a) > 0.0
    } else {
        true
    };

    TheoreticalBounds {
        v_max,
        delta_star,
        eps0_star,
        eps0_star_proof_variant,
        safe_distancing_ok,
        global_wellposed_ok: s0 <= eps0_star,
    }
}

/// Time-weighted statistics of one leader/follower pair over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    /// Mean net gap (piecewise-linear in time between samples).
    pub avg_gap: f64,
    /// Time-weighted variance of the net gap.
    pub gap_variance: f64,
    pub min_gap: f64,
    pub min_velocity: f64,
    /// First time the follower velocity went negative, if it did.
    pub t_first_negative_v: Option<f64>,
    /// Blow-up time estimate when the run terminated by blow-up.
    pub t_blowup_est: Option<f64>,
    /// First time the velocity became positive again after a negative or
    /// stopped phase.
    pub t_recover_positive_v: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("trajectory has no samples")]
    EmptyTrajectory,
    #[error("vehicle pair out of range")]
    BadPair,
}

/// Compute [`RunMetrics`] for the `(leader, follower)` index pair; `l` is the
/// vehicle length used for the net gap.
///
/// Means and variances treat the sampled gap as piecewise linear in time, so
/// adaptive step density does not bias the statistics.
pub fn compute_metrics(
    tr: &Trajectory,
    pair: (usize, usize),
    l: f64,
) -> Result<RunMetrics, MetricsError> {
    let (lead, follow) = pair;
    if tr.samples.is_empty() {
        return Err(MetricsError::EmptyTrajectory);
    }
    let n = tr.samples[0].state.vehicles.len();
    if lead >= n || follow >= n || lead == follow {
        return Err(MetricsError::BadPair);
    }

    let gap_at = |k: usize| {
        let s = &tr.samples[k].state;
        s.vehicles[lead].x - s.vehicles[follow].x - l
    };
    let t_at = |k: usize| tr.samples[k].t();
    let v_at = |k: usize| tr.samples[k].state.vehicles[follow].v;

    let m = tr.samples.len();
    let mut min_gap = f64::INFINITY;
    let mut min_velocity = f64::INFINITY;
    for k in 0..m {
        min_gap = min_gap.min(gap_at(k));
        min_velocity = min_velocity.min(v_at(k));
    }

    let total = t_at(m - 1) - t_at(0);
    let (avg_gap, gap_variance) = if total > 0.0 {
        let mut integral = 0.0;
        let mut integral_sq = 0.0;
        for k in 0..m - 1 {
            let h = t_at(k + 1) - t_at(k);
            let (g0, g1) = (gap_at(k), gap_at(k + 1));
            integral += 0.5 * h * (g0 + g1);
            integral_sq += h / 3.0 * (g0 * g0 + g0 * g1 + g1 * g1);
        }
        let mean = integral / total;
        (mean, (integral_sq / total - mean * mean).max(0.0))
    } else {
        (gap_at(0), 0.0)
    };

    // first sign change to negative velocity, refined by the located event
    // when one falls inside the bracketing sample interval
    let mut t_first_negative_v = None;
    for k in 1..m {
        if v_at(k) < 0.0 && v_at(k - 1) >= 0.0 {
            let t_interp = cross_time(t_at(k - 1), v_at(k - 1), t_at(k), v_at(k));
            t_first_negative_v = Some(refine_with_event(tr, follow, t_at(k - 1), t_at(k), t_interp));
            break;
        }
        if k == 1 && v_at(0) < 0.0 {
            t_first_negative_v = Some(t_at(0));
            break;
        }
    }
    if min_velocity >= 0.0 {
        t_first_negative_v = None;
    }

    // recovery: first return to positive velocity after a negative or
    // stopped phase
    let mut t_recover_positive_v = None;
    let mut phase_seen = false;
    for k in 0..m {
        let stopped = tr.samples[k].state.vehicles[follow].mode == Mode::Stopped;
        if v_at(k) < 0.0 || stopped {
            phase_seen = true;
        } else if phase_seen && v_at(k) > 0.0 {
            let t_interp = if k > 0 && v_at(k - 1) < 0.0 {
                cross_time(t_at(k - 1), v_at(k - 1), t_at(k), v_at(k))
            } else if k > 0 {
                t_at(k - 1)
            } else {
                t_at(0)
            };
            let lo = if k > 0 { t_at(k - 1) } else { t_at(0) };
            t_recover_positive_v = Some(refine_with_event(tr, follow, lo, t_at(k), t_interp));
            break;
        }
    }

    Ok(RunMetrics {
        avg_gap,
        gap_variance,
        min_gap,
        min_velocity,
        t_first_negative_v,
        t_blowup_est: match tr.termination {
            Termination::Blowup { t_est } => Some(t_est),
            _ => None,
        },
        t_recover_positive_v,
    })
}

fn cross_time(t0: f64, v0: f64, t1: f64, v1: f64) -> f64 {
    if v1 == v0 {
        t0
    } else {
        t0 + (0.0 - v0) * (t1 - t0) / (v1 - v0)
    }
}

fn refine_with_event(tr: &Trajectory, vehicle: usize, lo: f64, hi: f64, fallback: f64) -> f64 {
    tr.events
        .iter()
        .find(|e| {
            e.kind == crate::solver::EventKind::VelocityZeroCrossing(vehicle)
                && e.t >= lo
                && e.t <= hi
        })
        .map(|e| e.t)
        .unwrap_or(fallback)
}

/// Which hypotheses of the well-posedness results the scenario satisfies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionFlags {
    pub leader_free_flow: bool,
    pub delta_even_integer: bool,
    /// `v0 > v_l0 > 0` and initial net gap equal to `s0`.
    pub equilibrium_initial_condition: bool,
    pub safe_distancing: bool,
    /// `s0 <= eps0_star` (global nonnegative-velocity condition).
    pub global_s0_condition: bool,
    pub initial_gap_above_eps0_star: bool,
}

/// What the trajectory actually exhibited. Conclusion fields are only
/// populated when their hypothesis gate held, so the classification never
/// claims a theorem application whose premises failed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservedConclusions {
    /// First time the follower velocity meets the leader velocity, when the
    /// velocity-equilibrium hypotheses hold.
    pub velocity_equilibrium_t1: Option<f64>,
    /// Whether sampled gaps stayed above the conservative `eps0*`, when the
    /// initial gap exceeded it.
    pub gap_never_below_eps0_star: Option<bool>,
    pub no_negative_follower_velocity: bool,
    pub min_net_gap: f64,
    pub min_follower_velocity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunClassification {
    pub conditions: ConditionFlags,
    pub observed: ObservedConclusions,
}

/// Classify a run against the well-posedness conditions and report which
/// guaranteed conclusions were observed.
pub fn classify_run(s: &Scenario, tr: &Trajectory, b: &TheoreticalBounds) -> RunClassification {
    let p = &s.params;
    let two_car = s.initial.vehicles.len() >= 2;
    let leader_free_flow = matches!(s.leader, crate::leader::LeaderProfile::FreeFlow);
    let delta_even_integer =
        (p.delta - p.delta.round()).abs() < 1e-12 && (p.delta.round() as i64) % 2 == 0;

    let (v_l0, v0, gap0) = if two_car {
        (
            s.initial.vehicles[0].v,
            s.initial.vehicles[1].v,
            s.initial.net_gap(1, p.l),
        )
    } else {
        (0.0, 0.0, f64::INFINITY)
    };
    let equilibrium_initial_condition = two_car
        && v0 > v_l0
        && v_l0 > 0.0
        && (gap0 - p.s0).abs() <= 1e-9 * p.s0.max(1.0);

    let min_gap0 = (1..s.initial.vehicles.len())
        .map(|i| s.initial.net_gap(i, p.l))
        .fold(f64::INFINITY, f64::min);
    let initial_gap_above_eps0_star = min_gap0 > b.eps0_star_min();

    let min_net_gap = tr.min_net_gap(p.l);
    let min_follower_velocity = tr.min_follower_velocity();

    let equilibrium_gates =
        leader_free_flow && delta_even_integer && equilibrium_initial_condition;
    let velocity_equilibrium_t1 = if equilibrium_gates {
        first_velocity_meet(tr)
    } else {
        None
    };

    RunClassification {
        conditions: ConditionFlags {
            leader_free_flow,
            delta_even_integer,
            equilibrium_initial_condition,
            safe_distancing: b.safe_distancing_ok,
            global_s0_condition: b.global_wellposed_ok,
            initial_gap_above_eps0_star,
        },
        observed: ObservedConclusions {
            velocity_equilibrium_t1,
            gap_never_below_eps0_star: if initial_gap_above_eps0_star {
                Some(min_net_gap >= b.eps0_star_min() - 1e-6)
            } else {
                None
            },
            no_negative_follower_velocity: min_follower_velocity >= -1e-9,
            min_net_gap,
            min_follower_velocity,
        },
    }
}

/// First time the follower velocity drops to the leader velocity (they start
/// with `v0 > v_l0` under the equilibrium hypotheses).
fn first_velocity_meet(tr: &Trajectory) -> Option<f64> {
    let mut prev: Option<(f64, f64)> = None;
    for s in &tr.samples {
        let diff = s.state.vehicles[1].v - s.state.vehicles[0].v;
        let t = s.t();
        if let Some((t0, d0)) = prev {
            if d0 > 0.0 && diff <= 0.0 {
                return Some(cross_time(t0, d0, t, diff));
            }
        } else if diff <= 0.0 {
            return Some(t);
        }
        prev = Some((t, diff));
    }
    None
}

/// Rerun a scenario over a list of initial gaps and collect the metrics.
///
/// The first follower is moved so that its net gap to the leader equals each
/// requested value; everything else is left untouched. Intended for the
/// velocity-projected recovery-time study (constant-acceleration leader).
pub fn epsilon_sweep(
    base: &Scenario,
    eps_values: &[f64],
) -> Result<Vec<(f64, RunMetrics)>, InvalidScenario> {
    let mut out = Vec::with_capacity(eps_values.len());
    for &eps in eps_values {
        let mut s = base.clone();
        if s.initial.vehicles.len() >= 2 {
            s.initial.vehicles[1].x = s.initial.vehicles[0].x - s.params.l - eps;
        }
        let tr = integrate(&s)?;
        let metrics =
            compute_metrics(&tr, (0, 1), s.params.l).map_err(|_| InvalidScenario(vec![]))?;
        out.push((eps, metrics));
    }
    Ok(out)
}

/// Result of one named invariant check. `passed` is `None` when the check's
/// hypothesis did not apply to the run.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantCheck {
    pub name: &'static str,
    pub applicable: bool,
    pub passed: Option<bool>,
    pub details: String,
}

impl InvariantCheck {
    fn skipped(name: &'static str, details: String) -> Self {
        InvariantCheck {
            name,
            applicable: false,
            passed: None,
            details,
        }
    }

    fn result(name: &'static str, passed: bool, details: String) -> Self {
        InvariantCheck {
            name,
            applicable: true,
            passed: Some(passed),
            details,
        }
    }
}

/// Evaluate the theorem-backed invariants on a finished run.
pub fn run_invariant_checks(
    s: &Scenario,
    tr: &Trajectory,
    b: &TheoreticalBounds,
) -> Vec<InvariantCheck> {
    let p = &s.params;
    let mut checks = Vec::new();

    let min_leader_v = tr
        .samples
        .iter()
        .map(|smp| smp.state.vehicles[0].v)
        .fold(f64::INFINITY, f64::min);
    checks.push(InvariantCheck::result(
        "leader-velocity-nonnegative",
        min_leader_v >= -1e-9,
        format!("min leader velocity {min_leader_v:.3e}"),
    ));

    // velocity cap (classic variant, v0 <= v_free)
    let follower_v0_ok = s
        .initial
        .vehicles
        .iter()
        .skip(1)
        .all(|v| v.v <= p.v_free);
    if s.variant.variant == Variant::Classic && follower_v0_ok {
        let max_v = tr
            .samples
            .iter()
            .flat_map(|smp| smp.state.vehicles.iter().skip(1).map(|v| v.v))
            .fold(f64::NEG_INFINITY, f64::max);
        checks.push(InvariantCheck::result(
            "velocity-cap",
            max_v <= b.v_max + 1e-6,
            format!("max follower velocity {max_v:.6} vs cap {:.6}", b.v_max),
        ));
    } else {
        checks.push(InvariantCheck::skipped(
            "velocity-cap",
            "requires the classic variant with initial velocities below v_free".into(),
        ));
    }

    // guaranteed minimum gap
    let min_gap0 = (1..s.initial.vehicles.len())
        .map(|i| s.initial.net_gap(i, p.l))
        .fold(f64::INFINITY, f64::min);
    let eps0 = b.eps0_star_min();
    if min_gap0 > eps0 {
        let min_gap = tr.min_net_gap(p.l);
        checks.push(InvariantCheck::result(
            "gap-lower-bound",
            min_gap >= eps0 - 1e-6,
            format!("min net gap {min_gap:.6} vs eps0* {eps0:.6}"),
        ));
    } else {
        checks.push(InvariantCheck::skipped(
            "gap-lower-bound",
            format!("initial gap {min_gap0:.6} does not exceed eps0* {eps0:.6}"),
        ));
    }

    // nonnegative velocity for the regularized/discontinuous variants
    match s.variant.variant {
        Variant::VelocityRegularized { .. }
        | Variant::DistanceRegularized { .. }
        | Variant::Discontinuous => {
            let min_v = tr.min_follower_velocity();
            checks.push(InvariantCheck::result(
                "variant-velocity-nonnegative",
                min_v >= -1e-6,
                format!("min follower velocity {min_v:.3e}"),
            ));
        }
        _ => checks.push(InvariantCheck::skipped(
            "variant-velocity-nonnegative",
            "only asserted for the regularized and discontinuous variants".into(),
        )),
    }

    // blow-up time bound (normalized setting a = v_free = 1, delta >= 2)
    let normalized = p.a == 1.0 && p.v_free == 1.0 && p.delta >= 2.0;
    if let Termination::Blowup { t_est } = tr.termination {
        if normalized {
            let anchor = tr
                .samples
                .iter()
                .find(|smp| smp.state.vehicles.iter().skip(1).any(|v| v.v < -1.0))
                .map(|smp| {
                    let v = smp
                        .state
                        .vehicles
                        .iter()
                        .skip(1)
                        .map(|v| v.v)
                        .fold(f64::INFINITY, f64::min);
                    (smp.t(), v)
                });
            if let Some((t_star, v_star)) = anchor {
                let bound = t_star + 0.5 * ((v_star - 1.0) / (v_star + 1.0)).ln();
                checks.push(InvariantCheck::result(
                    "blowup-time-bound",
                    t_est <= bound + 0.05,
                    format!("t_est {t_est:.6} vs bound {bound:.6} (anchor t* = {t_star:.6}, v* = {v_star:.6})"),
                ));
            } else {
                checks.push(InvariantCheck::skipped(
                    "blowup-time-bound",
                    "no sample with velocity below -1".into(),
                ));
            }
        } else {
            checks.push(InvariantCheck::skipped(
                "blowup-time-bound",
                "bound derived for the normalized setting a = v_free = 1".into(),
            ));
        }

        // bounded position at blow-up: trailing total variation shrinks
        if tr.samples.len() >= 32 {
            let xs: Vec<f64> = tr
                .samples
                .iter()
                .map(|smp| smp.state.vehicles[1].x)
                .collect();
            let tv = |from: usize, to: usize| -> f64 {
                (from.max(1)..to)
                    .map(|k| (xs[k] - xs[k - 1]).abs())
                    .sum::<f64>()
            };
            let m = xs.len();
            let last10 = tv(m - 10, m);
            let prev90 = tv(m.saturating_sub(100), m - 10);
            let ok = last10.is_finite() && prev90.is_finite() && last10 <= prev90 + 1e-12;
            checks.push(InvariantCheck::result(
                "position-bounded-at-blowup",
                ok,
                format!("trailing position variation {last10:.3e} <= previous {prev90:.3e}"),
            ));
        } else {
            checks.push(InvariantCheck::skipped(
                "position-bounded-at-blowup",
                "too few samples".into(),
            ));
        }
    } else {
        checks.push(InvariantCheck::skipped(
            "blowup-time-bound",
            "run did not blow up".into(),
        ));
        checks.push(InvariantCheck::skipped(
            "position-bounded-at-blowup",
            "run did not blow up".into(),
        ));
    }

    checks
}

/// Everything a run report needs: termination, metrics for the first pair,
/// bounds, classification and invariant checks.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub termination: Termination,
    pub metrics: Option<RunMetrics>,
    pub bounds: TheoreticalBounds,
    pub classification: RunClassification,
    pub checks: Vec<InvariantCheck>,
}

pub fn build_run_report(s: &Scenario, tr: &Trajectory) -> RunReport {
    let bounds = compute_bounds_for_scenario(s);
    let metrics = if s.initial.vehicles.len() >= 2 {
        compute_metrics(tr, (0, 1), s.params.l).ok()
    } else {
        None
    };
    RunReport {
        termination: tr.termination,
        metrics,
        bounds,
        classification: classify_run(s, tr, &bounds),
        checks: run_invariant_checks(s, tr, &bounds),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Sample;
    use crate::state::VehicleState;

    /// Independent route to delta*: bisection on its defining quadratic
    /// `a d^2 + 3 v_max^2 d - a s0^2 = 0`.
    fn delta_star_by_bisection(a: f64, s0: f64, v_max: f64) -> f64 {
        let g = |d: f64| a * d * d + 3.0 * v_max * v_max * d - a * s0 * s0;
        let (mut lo, mut hi) = (0.0, s0.max(1.0));
        assert!(g(lo) < 0.0 && g(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn bounds_match_hand_values_and_bisection_oracle() {
        let p = ModelParams {
            a: 1.0,
            b: 2.0,
            v_free: 1.0,
            tau: 1.6,
            s0: 2.0,
            l: 4.0,
            delta: 4.0,
        };
        let initial = PlatoonState::pair(5.5, 0.0, 0.0, 0.0);
        let b = compute_bounds(&p, &initial);
        assert!((b.v_max - 1.0).abs() < 1e-15);
        assert!((b.delta_star - 1.0).abs() < 1e-12, "{}", b.delta_star);
        assert!((b.eps0_star - 1.0 / 6.0).abs() < 1e-12, "{}", b.eps0_star);
        assert!(
            (b.eps0_star_proof_variant - (1.0f64 / 3.0).sqrt()).abs() < 1e-12,
            "{}",
            b.eps0_star_proof_variant
        );
        let oracle = delta_star_by_bisection(p.a, p.s0, b.v_max);
        assert!((b.delta_star - oracle).abs() < 1e-10);
        // the two published expressions genuinely differ
        assert!((b.eps0_star - b.eps0_star_proof_variant).abs() > 0.1);
    }

    #[test]
    fn safe_distancing_trivially_holds_at_equal_velocities() {
        let p = ModelParams {
            a: 0.5,
            b: 1.0,
            v_free: 10.0,
            tau: 1.6,
            s0: 2.0,
            l: 4.0,
            delta: 4.0,
        };
        let initial = PlatoonState::pair(20.0, 3.0, 0.0, 3.0);
        assert!(compute_bounds(&p, &initial).safe_distancing_ok);
    }

    #[test]
    fn eps0_star_ignores_initial_velocities_below_v_free() {
        let p = ModelParams {
            a: 1.0,
            b: 2.0,
            v_free: 5.0,
            tau: 1.6,
            s0: 2.0,
            l: 4.0,
            delta: 4.0,
        };
        let b1 = compute_bounds(&p, &PlatoonState::pair(10.0, 0.0, 0.0, 1.0));
        let b2 = compute_bounds(&p, &PlatoonState::pair(10.0, 2.0, 0.0, 4.0));
        assert_eq!(b1.eps0_star, b2.eps0_star);
        assert_eq!(b1.delta_star, b2.delta_star);
    }

    fn synthetic_trajectory(points: &[(f64, f64)]) -> Trajectory {
        let samples = points
            .iter()
            .map(|&(t, gap)| Sample {
                state: PlatoonState {
                    t,
                    vehicles: vec![
                        VehicleState::new(gap + 4.0, 0.0),
                        VehicleState::new(0.0, 0.0),
                    ],
                },
                accel: vec![0.0, 0.0],
            })
            .collect();
        Trajectory {
            samples,
            events: Vec::new(),
            termination: Termination::Completed,
        }
    }

    #[test]
    fn metrics_constant_gap() {
        let tr = synthetic_trajectory(&[(0.0, 7.0), (0.4, 7.0), (1.0, 7.0)]);
        let m = compute_metrics(&tr, (0, 1), 4.0).unwrap();
        assert!((m.avg_gap - 7.0).abs() < 1e-12);
        assert!(m.gap_variance.abs() < 1e-12);
        assert_eq!(m.min_gap, 7.0);
    }

    #[test]
    fn metrics_linear_ramp_matches_closed_form() {
        // gap 0 -> 2 over [0, 1]: mean 1, variance 1/3
        let tr = synthetic_trajectory(&[(0.0, 0.0), (1.0, 2.0)]);
        let m = compute_metrics(&tr, (0, 1), 4.0).unwrap();
        assert!((m.avg_gap - 1.0).abs() < 1e-12);
        assert!((m.gap_variance - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn metrics_empty_trajectory_is_an_error() {
        let tr = Trajectory {
            samples: Vec::new(),
            events: Vec::new(),
            termination: Termination::Completed,
        };
        assert_eq!(
            compute_metrics(&tr, (0, 1), 4.0),
            Err(MetricsError::EmptyTrajectory)
        );
    }
}
