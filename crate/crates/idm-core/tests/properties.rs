//! Property tests for the acceleration laws, metrics and platoon coupling.

use idm_core::{
    builtin_scenarios, compute_metrics, eval_rhs, h_saturation, h_tilde_saturation, idm_accel,
    integrate, validate_scenario, variant_accel, AccelInput, LeaderProfile, Mode, ModelParams,
    PlatoonState, Sample, Scenario, SolverSettings, Termination, Trajectory, Variant,
    VariantConfig, VehicleState,
};
use proptest::prelude::*;

fn params_strategy() -> impl Strategy<Value = ModelParams> {
    (
        0.1f64..3.0,
        0.1f64..3.0,
        0.5f64..40.0,
        0.1f64..3.0,
        0.5f64..5.0,
        1.0f64..6.0,
        1.1f64..6.0,
    )
        .prop_map(|(a, b, v_free, tau, s0, l, delta)| ModelParams {
            a,
            b,
            v_free,
            tau,
            s0,
            l,
            delta,
        })
}

fn input_for(p: &ModelParams, gap: f64, v: f64, v_l: f64) -> AccelInput {
    AccelInput {
        x: 0.0,
        v,
        x_l: p.l + gap,
        v_l,
    }
}

proptest! {
    #[test]
    fn classic_acceleration_never_exceeds_a(
        p in params_strategy(),
        gap in 0.01f64..50.0,
        v_frac in 0.0f64..1.5,
        vl_frac in 0.0f64..1.5,
    ) {
        let v = v_frac * p.v_free;
        let v_l = vl_frac * p.v_free;
        let acc = idm_accel(&p, input_for(&p, gap, v, v_l), false).unwrap();
        prop_assert!(acc <= p.a + 1e-12, "acc = {acc}, a = {}", p.a);
    }

    #[test]
    fn regularized_variants_dominate_the_classic_law(
        p in params_strategy(),
        gap in 0.01f64..50.0,
        v_frac in 0.0f64..1.5,
        vl_frac in 0.0f64..1.5,
        eps_v in 0.01f64..2.0,
        eps_frac in 0.05f64..0.95,
    ) {
        let v = v_frac * p.v_free;
        let v_l = vl_frac * p.v_free;
        let input = input_for(&p, gap, v, v_l);
        let classic = idm_accel(&p, input, false).unwrap();
        let vra = variant_accel(
            &p,
            &VariantConfig::new(Variant::VelocityRegularized { eps_v }),
            input,
            Mode::Moving,
        )
        .unwrap();
        let dra = variant_accel(
            &p,
            &VariantConfig::new(Variant::DistanceRegularized { eps_d: eps_frac * p.s0 }),
            input,
            Mode::Moving,
        )
        .unwrap();
        prop_assert!(vra >= classic - 1e-12);
        prop_assert!(dra >= classic - 1e-12);
    }

    #[test]
    fn saturation_functions_are_lipschitz_and_bounded(
        eps_v in 0.01f64..5.0,
        v1 in -10.0f64..10.0,
        v2 in -10.0f64..10.0,
        s0 in 0.5f64..5.0,
        eps_frac in 0.05f64..0.95,
        g1 in 0.0f64..10.0,
        g2 in 0.0f64..10.0,
    ) {
        let h1 = h_saturation(eps_v, v1);
        let h2 = h_saturation(eps_v, v2);
        prop_assert!((0.0..=1.0).contains(&h1));
        prop_assert!((h1 - h2).abs() <= (v1 - v2).abs() / eps_v + 1e-12);
        if v1 <= 0.0 {
            prop_assert_eq!(h1, 0.0);
        }

        let eps_d = eps_frac * s0;
        let t1 = h_tilde_saturation(eps_d, s0, g1);
        let t2 = h_tilde_saturation(eps_d, s0, g2);
        prop_assert!(t1 >= eps_d / s0 - 1e-15 && t1 <= 1.0 + 1e-15);
        // the linear branch has slope 1/s0
        prop_assert!((t1 - t2).abs() <= (g1 - g2).abs() / s0 + 1e-12);
        if g1 >= g2 {
            prop_assert!(t1 >= t2 - 1e-15);
        }
    }

    #[test]
    fn velocity_regularized_standstill_is_full_drive(
        p in params_strategy(),
        gap in 0.001f64..100.0,
        v_l in 0.0f64..40.0,
        eps_v in 0.01f64..2.0,
    ) {
        let acc = variant_accel(
            &p,
            &VariantConfig::new(Variant::VelocityRegularized { eps_v }),
            input_for(&p, gap, 0.0, v_l),
            Mode::Moving,
        )
        .unwrap();
        prop_assert_eq!(acc, p.a);
    }

    #[test]
    fn discontinuous_branch_selection_is_total(
        p in params_strategy(),
        gap in 0.001f64..50.0,
        v_frac in 0.0f64..1.5,
        vl_frac in 0.0f64..1.5,
    ) {
        let v = v_frac * p.v_free;
        let v_l = vl_frac * p.v_free;
        let input = input_for(&p, gap, v, v_l);
        let cfg = VariantConfig::new(Variant::Discontinuous);
        let acc = variant_accel(&p, &cfg, input, Mode::Moving).unwrap();
        let classic = idm_accel(&p, input, false).unwrap();
        // exactly one branch applies: the classic law for v > 0 or a
        // sufficient gap, the stop branch otherwise
        if v > 0.0 || gap >= p.s0 {
            prop_assert_eq!(acc, classic);
        } else {
            prop_assert_eq!(acc, 0.0);
        }
    }

    #[test]
    fn metrics_are_invariant_under_time_reversal(
        gaps in prop::collection::vec(0.0f64..20.0, 2..40),
        dts in prop::collection::vec(0.01f64..2.0, 1..39),
    ) {
        let n = gaps.len().min(dts.len() + 1);
        let mut t = 0.0;
        let mut fwd = Vec::new();
        for k in 0..n {
            fwd.push((t, gaps[k]));
            if k + 1 < n {
                t += dts[k];
            }
        }
        let total = fwd.last().unwrap().0;
        let mut rev: Vec<(f64, f64)> = fwd.iter().map(|&(tk, g)| (total - tk, g)).collect();
        rev.reverse();

        let build = |pts: &[(f64, f64)]| Trajectory {
            samples: pts
                .iter()
                .map(|&(tk, g)| Sample {
                    state: PlatoonState {
                        t: tk,
                        vehicles: vec![VehicleState::new(g + 4.0, 0.0), VehicleState::new(0.0, 0.0)],
                    },
                    accel: vec![0.0, 0.0],
                })
                .collect(),
            events: Vec::new(),
            termination: Termination::Completed,
        };
        let mf = compute_metrics(&build(&fwd), (0, 1), 4.0).unwrap();
        let mr = compute_metrics(&build(&rev), (0, 1), 4.0).unwrap();
        prop_assert!((mf.avg_gap - mr.avg_gap).abs() < 1e-9);
        prop_assert!((mf.gap_variance - mr.gap_variance).abs() < 1e-9);
        prop_assert!(mf.min_gap <= mf.avg_gap + 1e-12);
    }

    #[test]
    fn rhs_coupling_is_one_directional(
        seed_x in prop::collection::vec(5.0f64..9.0, 4),
        vs in prop::collection::vec(0.0f64..2.0, 5),
        perturb in 1usize..5,
        dx in -0.5f64..0.5,
    ) {
        let params = ModelParams {
            a: 1.0,
            b: 2.0,
            v_free: 2.0,
            tau: 1.0,
            s0: 2.0,
            l: 4.0,
            delta: 4.0,
        };
        let mut x = 0.0;
        let mut vehicles = vec![VehicleState::new(0.0, vs[0])];
        for i in 0..4 {
            x -= seed_x[i];
            vehicles.push(VehicleState::new(x, vs[i + 1]));
        }
        let s = Scenario {
            solver: SolverSettings::defaults_for(params.v_free),
            params,
            variant: VariantConfig::classic(),
            leader: LeaderProfile::FreeFlow,
            initial: PlatoonState::new(0.0, vehicles),
            horizon: 1.0,
        };
        let base = eval_rhs(&s, &s.initial);
        let mut perturbed = s.initial.clone();
        perturbed.vehicles[perturb].x += dx;
        perturbed.vehicles[perturb].v += 0.1;
        let after = eval_rhs(&s, &perturbed);
        for i in 0..perturb {
            prop_assert_eq!(base.derivatives[i], after.derivatives[i]);
        }
    }
}

#[test]
fn builtin_leader_profiles_keep_velocity_nonnegative() {
    // free-flow and stop-and-go builtins: run and inspect the sampled leader
    for (name, entry) in builtin_scenarios() {
        let profile_ok = matches!(
            entry.scenario.leader,
            LeaderProfile::FreeFlow | LeaderProfile::StopAndGoSine { .. }
        );
        if !profile_ok {
            continue;
        }
        let mut s = entry.scenario.clone();
        s.horizon = s.horizon.min(30.0);
        if s.params.tau >= s.horizon {
            s.horizon = s.params.tau + 1.0;
        }
        let tr = integrate(&s).unwrap();
        let min_vl = tr
            .samples
            .iter()
            .map(|smp| smp.state.vehicles[0].v)
            .fold(f64::INFINITY, f64::min);
        assert!(min_vl >= -1e-9, "{name}: min leader velocity {min_vl}");
        assert!(
            !matches!(tr.termination, Termination::LeaderVelocityNegative { .. }),
            "{name}"
        );
    }
}

#[test]
fn every_builtin_passes_validation_unchanged() {
    for (name, entry) in builtin_scenarios() {
        let v = validate_scenario(entry.scenario.clone());
        assert!(v.is_ok(), "{name}: {:?}", v.err());
        assert_eq!(v.unwrap(), entry.scenario, "{name}");
    }
}
