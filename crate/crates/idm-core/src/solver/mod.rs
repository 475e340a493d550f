//! Adaptive Runge-Kutta integration with event location and finite-time
//! blow-up detection.

mod dopri5;
mod events;
mod reference;

pub use events::{locate_event, LocateError};
pub use reference::reference_integrate;

use crate::params::Variant;
use crate::platoon::{flat_rhs, flatten, unflatten};
use crate::scenario::{validation_errors, InvalidScenario, Scenario};
use crate::state::{Mode, PlatoonState};
use dopri5::{attempt_step, StepAttempt, StepResult};

/// Tolerance below zero allowed for the leader velocity before the run is
/// aborted (floating-point dust from exactly balanced accelerate/decelerate
/// phases lands at the scale of 1e-16).
const LEADER_V_TOL: f64 = 1e-9;

/// Net gap below which a step-size collapse is classified as a gap collapse
/// rather than a velocity blow-up (relative to `max(s0, 1)`).
const GAP_STALL_FRACTION: f64 = 1e-7;

/// Error-controller constants: safety factor and step-change limits.
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// Adaptive solver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// A follower speed below `-blowup_speed_threshold` terminates the run
    /// as a finite-time blow-up.
    pub blowup_speed_threshold: f64,
    /// Event times are located to within this many seconds.
    pub event_tol: f64,
    pub max_steps: usize,
}

impl SolverSettings {
    /// Defaults: tolerances 1e-8/1e-10, event tolerance 1e-9 s, and a
    /// blow-up speed threshold of fifty times the desired velocity.
    pub fn defaults_for(v_free: f64) -> Self {
        SolverSettings {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            dt_init: 1e-3,
            dt_min: 1e-12,
            dt_max: 0.1,
            blowup_speed_threshold: 50.0 * v_free,
            event_tol: 1e-9,
            max_steps: 1_000_000,
        }
    }
}

/// What a located event was.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// A follower velocity crossed zero (either direction). Vehicle index
    /// is 0-based with the leader at 0.
    VelocityZeroCrossing(usize),
    /// A stopped vehicle's net gap reached the minimum spacing (wake-up).
    GapReachesS0(usize),
    /// A net gap crossed zero.
    GapCollapse(usize),
    /// A follower speed passed the blow-up threshold.
    BlowupDetected(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub state_at_event: PlatoonState,
}

/// Why the integration ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    Blowup { t_est: f64 },
    GapCollapse { t: f64 },
    LeaderVelocityNegative { t: f64 },
    StepLimitReached,
}

impl Termination {
    pub fn is_completed(&self) -> bool {
        matches!(self, Termination::Completed)
    }
}

/// One accepted integration point.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub state: PlatoonState,
    /// Per-vehicle acceleration (dv/dt) at the sample, leader first.
    pub accel: Vec<f64>,
}

impl Sample {
    pub fn t(&self) -> f64 {
        self.state.t
    }
}

/// Dense result of one run: all accepted samples, located events, and the
/// termination cause.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn final_time(&self) -> f64 {
        self.samples.last().map(|s| s.t()).unwrap_or(0.0)
    }

    /// Smallest follower velocity over all samples.
    pub fn min_follower_velocity(&self) -> f64 {
        let mut m = f64::INFINITY;
        for s in &self.samples {
            for v in s.state.vehicles.iter().skip(1) {
                m = m.min(v.v);
            }
        }
        m
    }

    /// Smallest net gap over all samples and consecutive pairs.
    pub fn min_net_gap(&self, l: f64) -> f64 {
        let mut m = f64::INFINITY;
        for s in &self.samples {
            for i in 1..s.state.vehicles.len() {
                m = m.min(s.state.net_gap(i, l));
            }
        }
        m
    }
}

enum EventAction {
    Annotate,
    VelocityStop { vehicle: usize },
    Wake { vehicle: usize },
    Collapse,
}

struct PendingEvent {
    t: f64,
    kind: EventKind,
    action: EventAction,
}

/// Integrate a scenario from `t = 0` to its horizon or a terminal event.
pub fn integrate(s: &Scenario) -> Result<Trajectory, InvalidScenario> {
    let errs = validation_errors(s);
    if !errs.is_empty() {
        return Err(InvalidScenario(errs));
    }

    let p = &s.params;
    let set = &s.solver;
    let n = s.initial.vehicles.len();
    let dim = 2 * n;
    let discontinuous = s.variant.variant == Variant::Discontinuous;
    let accel_projected = matches!(s.variant.variant, Variant::AccelerationProjected { .. });

    // Normalize the initial modes: the discontinuous variant latches the stop
    // branch immediately for followers at rest inside the minimum spacing.
    let initial = if discontinuous {
        crate::platoon::update_modes(s, &s.initial)
    } else {
        s.initial.clone()
    };
    let mut modes: Vec<Mode> = initial.vehicles.iter().map(|v| v.mode).collect();
    let mut y = flatten(&initial);
    let mut t = 0.0_f64;
    let horizon = s.horizon;

    let mut samples = Vec::new();
    let mut recorded_events: Vec<Event> = Vec::new();

    // leader accelerations are frozen per step for profiles that are
    // piecewise constant in time
    let freeze_leader = !s.leader.is_velocity_coupled();
    let eval_k = |t: f64, y: &[f64], modes: &[Mode], out: &mut [f64]| -> bool {
        flat_rhs(s, modes, None, t, y, out)
    };

    let mut k1 = vec![0.0; dim];
    eval_k(t, &y, &modes, &mut k1);
    samples.push(make_sample(t, &y, &modes, &k1));

    if horizon == 0.0 {
        return Ok(Trajectory {
            samples,
            events: recorded_events,
            termination: Termination::Completed,
        });
    }

    let mut breakpoints = s.leader.breakpoints(horizon);
    breakpoints.dedup();
    let mut bp_idx = 0;

    let mut h_ctrl = set.dt_init.clamp(set.dt_min, set.dt_max);
    let mut just_rejected = false;
    let mut steps = 0usize;
    let termination;

    'outer: loop {
        if t >= horizon {
            termination = Termination::Completed;
            break;
        }
        if steps >= set.max_steps {
            termination = Termination::StepLimitReached;
            break;
        }
        steps += 1;

        while bp_idx < breakpoints.len() && breakpoints[bp_idx] <= t {
            bp_idx += 1;
        }
        let target = if bp_idx < breakpoints.len() {
            breakpoints[bp_idx].min(horizon)
        } else {
            horizon
        };
        let remaining = target - t;
        let clamped_to_target = h_ctrl >= remaining;
        let h_try = if clamped_to_target { remaining } else { h_ctrl };

        let frozen_u = if freeze_leader {
            Some(s.leader.accel(p, t, y[1]))
        } else {
            None
        };
        let mut f = |tt: f64, yy: &[f64], out: &mut [f64]| -> bool {
            flat_rhs(s, &modes, frozen_u, tt, yy, out)
        };

        let attempt = attempt_step(&mut f, t, &y, &k1, h_try, set.rel_tol, set.abs_tol);
        let result = match attempt {
            StepAttempt::DomainFault => {
                if h_try <= set.dt_min * 1.000_001 {
                    termination = classify_stall(s, t, &y, &modes);
                    break;
                }
                h_ctrl = (h_try * 0.5).max(set.dt_min);
                just_rejected = true;
                continue;
            }
            StepAttempt::Accepted(r) => r,
        };

        if result.err_norm > 1.0 {
            let factor = (SAFETY * result.err_norm.powf(-0.2)).clamp(FAC_MIN, 1.0);
            let h_new = h_try * factor;
            if h_try <= set.dt_min * 1.000_001 {
                termination = classify_stall(s, t, &y, &modes);
                break;
            }
            h_ctrl = h_new.max(set.dt_min);
            just_rejected = true;
            continue;
        }

        // controller suggestion for the next step
        let mut factor = (SAFETY * result.err_norm.powf(-0.2)).clamp(FAC_MIN, FAC_MAX);
        if just_rejected {
            factor = factor.min(1.0);
        }
        just_rejected = false;
        let h_suggest = (h_try * factor).clamp(set.dt_min, set.dt_max);

        let t_end = if clamped_to_target { target } else { t + h_try };
        let landed_on_breakpoint =
            clamped_to_target && bp_idx < breakpoints.len() && target == breakpoints[bp_idx];

        // ---- event handling over [t, t_end] ----
        let pending = scan_events(s, &modes, &result, &y, t, t_end, accel_projected);
        let action_at = pending
            .iter()
            .filter(|e| !matches!(e.action, EventAction::Annotate))
            .map(|e| e.t)
            .fold(f64::INFINITY, f64::min);

        for ev in &pending {
            if ev.t <= action_at || action_at.is_infinite() {
                if matches!(ev.action, EventAction::Annotate) {
                    recorded_events.push(Event {
                        kind: ev.kind,
                        t: ev.t,
                        state_at_event: unflatten(ev.t, &result.dense.eval(ev.t), &modes),
                    });
                }
            }
        }

        if action_at.is_finite() {
            let ev = pending
                .iter()
                .find(|e| e.t == action_at && !matches!(e.action, EventAction::Annotate))
                .expect("action event present");
            let t_e = ev.t.max(t);
            let mut y_e = result.dense.eval(t_e);

            match ev.action {
                EventAction::VelocityStop { vehicle } => {
                    y_e[2 * vehicle + 1] = 0.0;
                    let updated =
                        crate::platoon::update_modes(s, &unflatten(t_e, &y_e, &modes));
                    for (i, v) in updated.vehicles.iter().enumerate() {
                        modes[i] = v.mode;
                    }
                    recorded_events.push(Event {
                        kind: ev.kind,
                        t: t_e,
                        state_at_event: unflatten(t_e, &y_e, &modes),
                    });
                }
                EventAction::Wake { vehicle } => {
                    y_e[2 * vehicle + 1] = 0.0;
                    modes[vehicle] = Mode::Moving;
                    recorded_events.push(Event {
                        kind: ev.kind,
                        t: t_e,
                        state_at_event: unflatten(t_e, &y_e, &modes),
                    });
                }
                EventAction::Collapse => {
                    let state_e = unflatten(t_e, &y_e, &modes);
                    recorded_events.push(Event {
                        kind: ev.kind,
                        t: t_e,
                        state_at_event: state_e,
                    });
                    y = y_e;
                    t = t_e;
                    eval_k(t, &y, &modes, &mut k1);
                    if t > samples.last().map(|s: &Sample| s.t()).unwrap_or(t) {
                        samples.push(make_sample(t, &y, &modes, &k1));
                    }
                    termination = Termination::GapCollapse { t };
                    break 'outer;
                }
                EventAction::Annotate => unreachable!(),
            }

            y = y_e;
            let advanced = t_e > t;
            t = t_e;
            eval_k(t, &y, &modes, &mut k1);
            if advanced {
                samples.push(make_sample(t, &y, &modes, &k1));
            }
            h_ctrl = h_suggest;
            continue;
        }

        // ---- plain acceptance ----
        let StepResult { y_new, k7, .. } = result;
        y = y_new;
        t = t_end;
        if landed_on_breakpoint {
            eval_k(t, &y, &modes, &mut k1);
        } else {
            k1 = k7;
        }
        samples.push(make_sample(t, &y, &modes, &k1));
        h_ctrl = h_suggest;

        if y[1] < -LEADER_V_TOL {
            termination = Termination::LeaderVelocityNegative { t };
            break;
        }
        let mut blown = None;
        for i in 1..n {
            if y[2 * i + 1] < -set.blowup_speed_threshold {
                blown = Some(i);
                break;
            }
        }
        if let Some(vehicle) = blown {
            recorded_events.push(Event {
                kind: EventKind::BlowupDetected(vehicle),
                t,
                state_at_event: unflatten(t, &y, &modes),
            });
            termination = Termination::Blowup { t_est: t };
            break;
        }
    }

    Ok(Trajectory {
        samples,
        events: recorded_events,
        termination,
    })
}

fn make_sample(t: f64, y: &[f64], modes: &[Mode], k: &[f64]) -> Sample {
    let accel = (0..modes.len()).map(|i| k[2 * i + 1]).collect();
    Sample {
        state: unflatten(t, y, modes),
        accel,
    }
}

/// Scan one accepted step for candidate events, using endpoint and midpoint
/// signs of each event function on the dense output.
fn scan_events(
    s: &Scenario,
    modes: &[Mode],
    result: &StepResult,
    y0: &[f64],
    t0: f64,
    t1: f64,
    accel_projected: bool,
) -> Vec<PendingEvent> {
    let p = &s.params;
    let n = modes.len();
    let dense = &result.dense;
    let discontinuous = s.variant.variant == Variant::Discontinuous;
    let tol = s.solver.event_tol;
    let tm = 0.5 * (t0 + t1);
    let mut out = Vec::new();

    // first sub-bracket of [lo, mid, hi] where the predicate on (f_a, f_b)
    // holds, searched left to right
    let first_bracket = |f0: f64, fm: f64, f1: f64, pred: &dyn Fn(f64, f64) -> bool| {
        if pred(f0, fm) {
            Some((t0, tm))
        } else if pred(fm, f1) {
            Some((tm, t1))
        } else if pred(f0, f1) {
            Some((t0, t1))
        } else {
            None
        }
    };

    for i in 1..n {
        let vi = 2 * i + 1;
        let gap_of = |t: f64| dense.eval_component(t, 2 * (i - 1)) - dense.eval_component(t, 2 * i) - p.l;
        let v_of = |t: f64| dense.eval_component(t, vi);

        if modes[i] == Mode::Stopped {
            // wake-up: the net gap reaches the minimum spacing from below
            let f0 = gap_of(t0) - p.s0;
            let fm = gap_of(tm) - p.s0;
            let f1 = gap_of(t1) - p.s0;
            if let Some(br) = first_bracket(f0, fm, f1, &|a, b| a <= 0.0 && b > 0.0) {
                let t_e = locate_event(|t| gap_of(t) - p.s0, br, tol).unwrap_or(br.0);
                out.push(PendingEvent {
                    t: t_e,
                    kind: EventKind::GapReachesS0(i),
                    action: EventAction::Wake { vehicle: i },
                });
            }
            continue;
        }

        // velocity zero crossings
        let f0 = y0[vi];
        let fm = v_of(tm);
        let f1 = result.y_new[vi];
        if let Some(br) = first_bracket(f0, fm, f1, &|a, b| a > 0.0 && b <= 0.0) {
            let t_e = locate_event(|t| v_of(t), br, tol).unwrap_or(br.0);
            out.push(PendingEvent {
                t: t_e,
                kind: EventKind::VelocityZeroCrossing(i),
                action: if discontinuous {
                    EventAction::VelocityStop { vehicle: i }
                } else {
                    EventAction::Annotate
                },
            });
        } else if let Some(br) = first_bracket(f0, fm, f1, &|a, b| a < 0.0 && b > 0.0) {
            let t_e = locate_event(|t| v_of(t), br, tol).unwrap_or(br.0);
            out.push(PendingEvent {
                t: t_e,
                kind: EventKind::VelocityZeroCrossing(i),
                action: EventAction::Annotate,
            });
        }

        // gap collapse
        let g0 = y0[2 * (i - 1)] - y0[2 * i] - p.l;
        let gm = gap_of(tm);
        let g1 = result.y_new[2 * (i - 1)] - result.y_new[2 * i] - p.l;
        if let Some(br) = first_bracket(g0, gm, g1, &|a, b| a > 0.0 && b <= 0.0) {
            let t_e = locate_event(|t| gap_of(t), br, tol).unwrap_or(br.0);
            out.push(PendingEvent {
                t: t_e,
                kind: EventKind::GapCollapse(i),
                action: if accel_projected {
                    // the acceleration-projected law is defined through the
                    // contact, so the crossing is only annotated
                    EventAction::Annotate
                } else {
                    EventAction::Collapse
                },
            });
        }
    }

    out.sort_by(|a, b| a.t.total_cmp(&b.t));
    out
}

/// Classify a step-size collapse at `(t, y)`.
fn classify_stall(s: &Scenario, t: f64, y: &[f64], modes: &[Mode]) -> Termination {
    let p = &s.params;
    let n = modes.len();
    let mut min_gap = f64::INFINITY;
    let mut min_v = f64::INFINITY;
    for i in 1..n {
        min_gap = min_gap.min(y[2 * (i - 1)] - y[2 * i] - p.l);
        min_v = min_v.min(y[2 * i + 1]);
    }
    if min_gap <= GAP_STALL_FRACTION * p.s0.max(1.0) {
        return Termination::GapCollapse { t };
    }
    let mut out = vec![0.0; y.len()];
    flat_rhs(s, modes, None, t, y, &mut out);
    let accel_mag = (1..n).map(|i| out[2 * i + 1].abs()).fold(0.0, f64::max);
    if min_v < 0.0 && accel_mag > 10.0 * p.a {
        Termination::Blowup { t_est: t }
    } else {
        Termination::StepLimitReached
    }
}
