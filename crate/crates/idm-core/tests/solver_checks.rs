//! Scenario-level checks of the adaptive integrator against hand analysis
//! and the fixed-step RK4 oracle.

use idm_core::{
    builtin_scenarios, compute_metrics, integrate, reference_integrate, EventKind, LeaderProfile,
    Mode, ModelParams, PlatoonState, Scenario, SolverSettings, Termination, Variant,
    VariantConfig, VehicleState,
};

fn scenario(name: &str) -> Scenario {
    builtin_scenarios()[name].scenario.clone()
}

#[test]
fn neg_velocity_completes_with_a_negative_dip() {
    let tr = integrate(&scenario("neg-velocity")).unwrap();
    assert!(tr.termination.is_completed());
    assert_eq!(tr.final_time(), 3.0);
    assert!((tr.samples[0].accel[1] - (-7.0 / 9.0)).abs() < 1e-9);
    assert!(tr.min_follower_velocity() < -0.1);
    // the dip is eventually recovered
    assert!(tr.samples.last().unwrap().state.vehicles[1].v > 0.0);
}

#[test]
fn safe_gap_keeps_velocity_nonnegative() {
    let tr = integrate(&scenario("safe-gap")).unwrap();
    assert!(tr.termination.is_completed());
    assert!(tr.min_follower_velocity() >= -1e-10);
}

#[test]
fn blowup_terminates_near_the_reported_time() {
    let tr = integrate(&scenario("blowup")).unwrap();
    match tr.termination {
        Termination::Blowup { t_est } => {
            assert!((0.96..=1.16).contains(&t_est), "t_est = {t_est}");
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
    assert!(tr
        .events
        .iter()
        .any(|e| matches!(e.kind, EventKind::BlowupDetected(1))));
    // samples stay strictly increasing in time
    for w in tr.samples.windows(2) {
        assert!(w[1].t() > w[0].t());
    }
}

#[test]
fn adaptive_matches_rk4_reference_on_safe_gap() {
    let s = scenario("safe-gap");
    let adaptive = integrate(&s).unwrap();
    let reference = reference_integrate(&s, 1e-4);
    // compare positions at every adaptive sample against the (dense) RK4
    // grid, interpolating the reference linearly
    let ref_t: Vec<f64> = reference.samples.iter().map(|s| s.t()).collect();
    let mut worst = 0.0_f64;
    for smp in &adaptive.samples {
        let t = smp.t();
        let k = match ref_t.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(k) => k,
            Err(k) => k.saturating_sub(1),
        };
        for (vi, veh) in smp.state.vehicles.iter().enumerate() {
            let x_ref = if k + 1 < ref_t.len() && ref_t[k + 1] > ref_t[k] {
                let w = (t - ref_t[k]) / (ref_t[k + 1] - ref_t[k]);
                let x0 = reference.samples[k].state.vehicles[vi].x;
                let x1 = reference.samples[k + 1].state.vehicles[vi].x;
                x0 + w.clamp(0.0, 1.0) * (x1 - x0)
            } else {
                reference.samples[k].state.vehicles[vi].x
            };
            worst = worst.max((veh.x - x_ref).abs());
        }
    }
    assert!(worst < 1e-5, "max position discrepancy {worst}");
}

#[test]
fn reference_scheme_exhibits_fourth_order_self_convergence() {
    let s = scenario("safe-gap");
    let final_x = |dt: f64| {
        let tr = reference_integrate(&s, dt);
        let last = &tr.samples.last().unwrap().state;
        [last.vehicles[0].x, last.vehicles[1].x, last.vehicles[0].v, last.vehicles[1].v]
    };
    let y1 = final_x(0.1);
    let y2 = final_x(0.05);
    let y3 = final_x(0.025);
    let e1 = y1
        .iter()
        .zip(&y2)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let e2 = y2
        .iter()
        .zip(&y3)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    let order = (e1 / e2).log2();
    assert!(
        (3.7..=4.3).contains(&order),
        "order = {order} (e1 = {e1}, e2 = {e2})"
    );
}

#[test]
fn integrate_is_deterministic() {
    for name in ["neg-velocity", "blowup", "stop-and-go"] {
        let mut s = scenario(name);
        if name == "stop-and-go" {
            s.horizon = 20.0;
        }
        let a = integrate(&s).unwrap();
        let b = integrate(&s).unwrap();
        assert_eq!(a.samples.len(), b.samples.len(), "{name}");
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.t().to_bits(), y.t().to_bits(), "{name}");
            for (u, v) in x.state.vehicles.iter().zip(&y.state.vehicles) {
                assert_eq!(u.x.to_bits(), v.x.to_bits(), "{name}");
                assert_eq!(u.v.to_bits(), v.v.to_bits(), "{name}");
            }
        }
        assert_eq!(a.events.len(), b.events.len());
        assert_eq!(a.termination, b.termination);
    }
}

#[test]
fn discontinuous_variant_latches_and_releases_the_stop_branch() {
    let mut s = scenario("neg-velocity");
    s.variant = VariantConfig::new(Variant::Discontinuous);
    s.horizon = 10.0;
    let tr = integrate(&s).unwrap();
    assert!(tr.termination.is_completed());
    // never below zero (the stop branch holds the vehicle)
    assert!(tr.min_follower_velocity() >= -1e-9);
    // it was parked for a while and then released by a wake-up event
    assert!(tr
        .samples
        .iter()
        .any(|smp| smp.state.vehicles[1].mode == Mode::Stopped));
    assert!(tr
        .events
        .iter()
        .any(|e| matches!(e.kind, EventKind::GapReachesS0(1))));
    let last = tr.samples.last().unwrap();
    assert!(last.state.vehicles[1].v > 0.0);
    assert_eq!(last.state.vehicles[1].mode, Mode::Moving);
}

#[test]
fn velocity_projected_positions_never_decrease() {
    let mut s = scenario("neg-velocity");
    s.variant = VariantConfig::new(Variant::VelocityProjected);
    s.horizon = 10.0;
    let tr = integrate(&s).unwrap();
    assert!(tr.termination.is_completed());
    for w in tr.samples.windows(2) {
        for i in 0..2 {
            assert!(
                w[1].state.vehicles[i].x >= w[0].state.vehicles[i].x - 1e-12,
                "position decreased at t = {}",
                w[1].t()
            );
        }
    }
}

#[test]
fn overtake_run_crosses_zero_gap_and_continues() {
    let s = scenario("overtake");
    let tr = integrate(&s).unwrap();
    assert!(tr.termination.is_completed());
    assert!(tr.min_net_gap(s.params.l) < 0.0);
    assert!(tr
        .events
        .iter()
        .any(|e| matches!(e.kind, EventKind::GapCollapse(1))));
}

#[test]
fn classic_emergency_braking_is_collision_free() {
    // A fast follower almost on the leader's bumper: the interaction term
    // diverges as the gap shrinks, so the classic law always stops the car
    // before contact (the gap stays positive even in this extreme).
    let params = ModelParams {
        a: 1.0,
        b: 2.0,
        v_free: 10.0,
        tau: 0.1,
        s0: 0.1,
        l: 4.0,
        delta: 4.0,
    };
    let s = Scenario {
        solver: SolverSettings::defaults_for(params.v_free),
        params,
        variant: VariantConfig::classic(),
        leader: LeaderProfile::ConstantAccel { u: 0.0 },
        initial: PlatoonState::pair(4.5, 0.0, 0.0, 9.0),
        horizon: 2.0,
    };
    let tr = integrate(&s).unwrap();
    assert!(tr.min_net_gap(s.params.l) > 0.0);
    assert!(!matches!(tr.termination, Termination::GapCollapse { .. }));
}

#[test]
fn leader_profile_breakpoints_are_respected() {
    // piecewise leader: accelerate, cruise, brake to a stop
    let params = ModelParams {
        a: 1.0,
        b: 2.0,
        v_free: 5.0,
        tau: 1.0,
        s0: 2.0,
        l: 4.0,
        delta: 4.0,
    };
    let s = Scenario {
        solver: SolverSettings::defaults_for(params.v_free),
        params,
        variant: VariantConfig::classic(),
        leader: LeaderProfile::PiecewiseConstant {
            schedule: vec![(0.0, 1.0), (2.0, 0.0), (5.0, -1.0), (7.0, 0.0)],
        },
        initial: PlatoonState::pair(10.0, 0.0, 0.0, 0.0),
        horizon: 9.0,
    };
    let tr = integrate(&s).unwrap();
    assert!(tr.termination.is_completed());
    // the leader velocity is piecewise linear and integrated exactly:
    // v = 2 on [2, 5], back to 0 at t = 7
    let at = |t: f64| {
        tr.samples
            .iter()
            .find(|smp| (smp.t() - t).abs() < 1e-12)
            .unwrap_or_else(|| panic!("no sample lands on t = {t}"))
    };
    assert!((at(2.0).state.vehicles[0].v - 2.0).abs() < 1e-9);
    assert!((at(5.0).state.vehicles[0].v - 2.0).abs() < 1e-9);
    assert!(at(7.0).state.vehicles[0].v.abs() < 1e-9);
    assert!(at(9.0).state.vehicles[0].v.abs() < 1e-9);
}

#[test]
fn stop_and_go_leader_velocity_stays_nonnegative() {
    let s = scenario("stop-and-go");
    let tr = integrate(&s).unwrap();
    assert!(tr.termination.is_completed(), "{:?}", tr.termination);
    let min_vl = tr
        .samples
        .iter()
        .map(|smp| smp.state.vehicles[0].v)
        .fold(f64::INFINITY, f64::min);
    assert!(min_vl >= -1e-9, "min leader velocity {min_vl}");
}

#[test]
fn zero_horizon_gives_the_initial_sample_only() {
    let mut s = scenario("safe-gap");
    s.horizon = 0.0;
    let tr = integrate(&s).unwrap();
    assert_eq!(tr.samples.len(), 1);
    assert!(tr.termination.is_completed());
}

#[test]
fn five_vehicle_chain_integrates_with_one_directional_coupling() {
    let params = ModelParams {
        a: 1.0,
        b: 2.0,
        v_free: 1.0,
        tau: 1.6,
        s0: 2.0,
        l: 4.0,
        delta: 4.0,
    };
    let vehicles: Vec<VehicleState> = (0..5)
        .map(|i| VehicleState::new(-(i as f64) * 7.0, 0.0))
        .collect();
    let s = Scenario {
        solver: SolverSettings::defaults_for(params.v_free),
        params,
        variant: VariantConfig::classic(),
        leader: LeaderProfile::FreeFlow,
        initial: PlatoonState::new(0.0, vehicles),
        horizon: 5.0,
    };
    let tr = integrate(&s).unwrap();
    assert!(tr.termination.is_completed());
    let m = compute_metrics(&tr, (0, 1), s.params.l).unwrap();
    assert!(m.min_gap > 0.0);
}

#[test]
fn recovery_time_metric_matches_the_event_location() {
    // velocity-projected dip: recovery time must line up with the located
    // upcrossing event
    let mut s = scenario("eps-sweep");
    s.initial.vehicles[1].x = s.initial.vehicles[0].x - s.params.l - 1.0;
    let tr = integrate(&s).unwrap();
    let m = compute_metrics(&tr, (0, 1), s.params.l).unwrap();
    let t_rec = m.t_recover_positive_v.expect("recovers");
    let event_t = tr
        .events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::VelocityZeroCrossing(1)))
        .map(|e| e.t)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((t_rec - event_t).abs() < 1e-9, "{t_rec} vs {event_t}");
    assert!(m.t_first_negative_v.is_some());
}
