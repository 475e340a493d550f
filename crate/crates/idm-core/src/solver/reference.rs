//! Fixed-step classical RK4 oracle.

use crate::params::Variant;
use crate::platoon::{flat_rhs, flatten, unflatten};
use crate::scenario::Scenario;
use crate::state::Mode;
use crate::solver::{Sample, Termination, Trajectory};

/// Classical fixed-step RK4 over the scenario horizon.
///
/// No event machinery; the only special treatment is pointwise post-step
/// handling for the discontinuous variant (latching/releasing the stop
/// branch at step boundaries). Intended purely as a brute-force oracle for
/// property and equivalence tests.
pub fn reference_integrate(s: &Scenario, dt: f64) -> Trajectory {
    assert!(dt > 0.0, "reference step must be positive");
    let p = &s.params;
    let n = s.initial.vehicles.len();
    let dim = 2 * n;
    let discontinuous = s.variant.variant == Variant::Discontinuous;

    let initial = if discontinuous {
        crate::platoon::update_modes(s, &s.initial)
    } else {
        s.initial.clone()
    };
    let mut modes: Vec<Mode> = initial.vehicles.iter().map(|v| v.mode).collect();
    let mut y = flatten(&initial);
    let mut t = 0.0_f64;

    let mut k = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];

    let mut samples = Vec::new();
    flat_rhs(s, &modes, None, t, &y, &mut k);
    samples.push(Sample {
        state: unflatten(t, &y, &modes),
        accel: (0..n).map(|i| k[2 * i + 1]).collect(),
    });

    let total_steps = (s.horizon / dt).ceil() as usize;
    let mut termination = Termination::Completed;

    'run: for step in 0..total_steps {
        let h = (s.horizon - t).min(dt);
        if h <= 0.0 {
            break;
        }

        let ok1 = flat_rhs(s, &modes, None, t, &y, &mut k);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k[i];
        }
        let ok2 = flat_rhs(s, &modes, None, t + 0.5 * h, &stage, &mut k2);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k2[i];
        }
        let ok3 = flat_rhs(s, &modes, None, t + 0.5 * h, &stage, &mut k3);
        for i in 0..dim {
            stage[i] = y[i] + h * k3[i];
        }
        let ok4 = flat_rhs(s, &modes, None, t + h, &stage, &mut k4);
        if !(ok1 && ok2 && ok3 && ok4) {
            termination = Termination::GapCollapse { t };
            break 'run;
        }

        for i in 0..dim {
            y[i] += h / 6.0 * (k[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if !y[i].is_finite() {
                termination = Termination::Blowup { t_est: t };
                break 'run;
            }
        }
        t = if step + 1 == total_steps { s.horizon } else { t + h };

        if discontinuous {
            for i in 1..n {
                let gap = y[2 * (i - 1)] - y[2 * i] - p.l;
                match modes[i] {
                    Mode::Moving => {
                        if y[2 * i + 1] <= 0.0 {
                            y[2 * i + 1] = 0.0;
                            if gap < p.s0 {
                                modes[i] = Mode::Stopped;
                            }
                        }
                    }
                    Mode::Stopped => {
                        if gap > p.s0 {
                            modes[i] = Mode::Moving;
                        }
                    }
                }
            }
        }

        flat_rhs(s, &modes, None, t, &y, &mut k);
        samples.push(Sample {
            state: unflatten(t, &y, &modes),
            accel: (0..n).map(|i| k[2 * i + 1]).collect(),
        });

        for i in 1..n {
            if y[2 * i + 1] < -s.solver.blowup_speed_threshold {
                termination = Termination::Blowup { t_est: t };
                break 'run;
            }
        }
    }

    Trajectory {
        samples,
        events: Vec::new(),
        termination,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_scenarios;

    #[test]
    fn zero_horizon_yields_single_sample() {
        let mut s = builtin_scenarios()["safe-gap"].scenario.clone();
        s.horizon = 0.0;
        let tr = reference_integrate(&s, 1e-3);
        assert_eq!(tr.samples.len(), 1);
        assert!(tr.termination.is_completed());
    }

    #[test]
    fn last_sample_lands_exactly_on_the_horizon() {
        let s = builtin_scenarios()["safe-gap"].scenario.clone();
        let tr = reference_integrate(&s, 1e-2);
        assert_eq!(tr.final_time(), 3.0);
    }
}
