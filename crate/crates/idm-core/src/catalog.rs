//! Built-in scenario catalog.

use crate::leader::LeaderProfile;
use crate::params::{ModelParams, Variant, VariantConfig};
use crate::scenario::Scenario;
use crate::solver::SolverSettings;
use crate::state::PlatoonState;
use std::collections::BTreeMap;

/// A named catalog scenario with a one-line summary.
#[derive(Debug, Clone)]
pub struct ScenarioEntry {
    pub scenario: Scenario,
    pub summary: &'static str,
}

/// Parameters of the two-vehicle counterexamples (desired velocity 1 m/s).
fn unit_params() -> ModelParams {
    ModelParams {
        a: 1.0,
        b: 2.0,
        v_free: 1.0,
        tau: 1.6,
        s0: 2.0,
        l: 4.0,
        delta: 4.0,
    }
}

/// Parameters of the stop-and-go comparison runs.
fn stop_and_go_params() -> ModelParams {
    ModelParams {
        a: 0.73,
        b: 1.67,
        v_free: 120.0 / 36.0,
        tau: 1.6,
        s0: 2.0,
        l: 4.0,
        delta: 4.0,
    }
}

fn two_car(params: ModelParams, gap: f64, v0: f64, v_l0: f64) -> PlatoonState {
    PlatoonState::pair(params.l + gap, v_l0, 0.0, v0)
}

fn scenario(
    params: ModelParams,
    variant: VariantConfig,
    leader: LeaderProfile,
    initial: PlatoonState,
    horizon: f64,
) -> Scenario {
    Scenario {
        solver: SolverSettings::defaults_for(params.v_free),
        params,
        variant,
        leader,
        initial,
        horizon,
    }
}

/// The named scenario catalog.
///
/// Gap choices follow the runs behind the published figures and the
/// distance-comparison table:
///
/// * `neg-velocity` / `safe-gap` start at gaps 1.5 / 2.0 with a free-flow
///   leader,
/// * `blowup` starts at gap 1.0 with `b = 1/4`; with the unit-parameter
///   `b = 2` that datum provably recovers instead of diverging (the follower
///   velocity bottoms out near -0.52), while `b = 1/4` reproduces the
///   reported divergence at t close to 1.06,
/// * `case1`..`case3` are the three comparison scenarios (gaps 1.5, 0.5 and
///   1.0; the third under the stop-and-go leader),
/// * `eps-sweep` is the velocity-projected recovery-time study with a
///   constant-acceleration leader (u = 2).
pub fn builtin_scenarios() -> BTreeMap<&'static str, ScenarioEntry> {
    let mut map = BTreeMap::new();
    let unit = unit_params();

    map.insert(
        "neg-velocity",
        ScenarioEntry {
            scenario: scenario(
                unit,
                VariantConfig::classic(),
                LeaderProfile::FreeFlow,
                two_car(unit, 1.5, 0.0, 0.0),
                3.0,
            ),
            summary: "classic IDM, gap 1.5 < s0: the follower backs up (negative velocity)",
        },
    );

    map.insert(
        "safe-gap",
        ScenarioEntry {
            scenario: scenario(
                unit,
                VariantConfig::classic(),
                LeaderProfile::FreeFlow,
                two_car(unit, 2.0, 0.0, 0.0),
                3.0,
            ),
            summary: "classic IDM, gap = s0: the follower velocity stays nonnegative",
        },
    );

    let blowup_params = ModelParams { b: 0.25, ..unit };
    map.insert(
        "blowup",
        ScenarioEntry {
            scenario: scenario(
                blowup_params,
                VariantConfig::classic(),
                LeaderProfile::FreeFlow,
                two_car(blowup_params, 1.0, 0.0, 0.0),
                3.0,
            ),
            summary: "classic IDM, gap 1.0, b = 1/4: follower velocity diverges near t = 1.06",
        },
    );

    let analytic = ModelParams {
        a: 1.0,
        b: 0.25,
        v_free: 1.0,
        tau: 8.0,
        s0: 16.0,
        l: 4.0,
        delta: 4.0,
    };
    map.insert(
        "analytic-blowup",
        ScenarioEntry {
            scenario: scenario(
                analytic,
                VariantConfig::classic(),
                LeaderProfile::ConstantAccel { u: 0.0 },
                two_car(analytic, 0.5, 0.0, 0.0),
                10.0,
            ),
            summary: "hand-analyzable blow-up (s0 = 16, tau = 8, parked leader, gap 0.5)",
        },
    );

    let sg = stop_and_go_params();
    let stop_and_go = scenario(
        sg,
        VariantConfig::classic(),
        LeaderProfile::stop_and_go(sg.a),
        two_car(sg, 1.0, 0.0, 0.0),
        100.0,
    );
    map.insert(
        "stop-and-go",
        ScenarioEntry {
            scenario: stop_and_go.clone(),
            summary: "heavy stop-and-go wave driven by a sine-indicator leader profile",
        },
    );

    map.insert(
        "overtake",
        ScenarioEntry {
            scenario: scenario(
                unit,
                VariantConfig::new(Variant::AccelerationProjected { a_min: 1.0 }),
                LeaderProfile::ConstantAccel { u: 0.0 },
                two_car(unit, 1.5, 5.0, 0.0),
                3.0,
            ),
            summary: "acceleration-projected IDM with v0 = 5: the follower overtakes the leader",
        },
    );

    map.insert(
        "case1",
        ScenarioEntry {
            scenario: scenario(
                unit,
                VariantConfig::classic(),
                LeaderProfile::FreeFlow,
                two_car(unit, 1.5, 0.0, 0.0),
                10.0,
            ),
            summary: "comparison case 1: gap 1.5, free-flow leader, horizon 10",
        },
    );
    map.insert(
        "case2",
        ScenarioEntry {
            scenario: scenario(
                unit,
                VariantConfig::classic(),
                LeaderProfile::FreeFlow,
                two_car(unit, 0.5, 0.0, 0.0),
                10.0,
            ),
            summary: "comparison case 2: gap 0.5, free-flow leader, horizon 10",
        },
    );
    map.insert(
        "case3",
        ScenarioEntry {
            scenario: stop_and_go,
            summary: "comparison case 3: gap 1.0 under the stop-and-go leader, horizon 100",
        },
    );

    map.insert(
        "eps-sweep",
        ScenarioEntry {
            scenario: scenario(
                unit,
                VariantConfig::new(Variant::VelocityProjected),
                LeaderProfile::ConstantAccel { u: 2.0 },
                two_car(unit, 0.5, 0.0, 0.0),
                50.0,
            ),
            summary: "velocity-projected recovery-time study base (leader accel u = 2)",
        },
    );

    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::validate_scenario;

    #[test]
    fn catalog_positions_match_published_figures() {
        let map = builtin_scenarios();
        let neg = &map["neg-velocity"].scenario;
        assert_eq!(neg.initial.vehicles[0].x, 5.5); // l + 1.5
        let blow = &map["blowup"].scenario;
        assert_eq!(blow.initial.vehicles[0].x, 5.0); // l + 1.0
        assert_eq!(blow.params.b, 0.25);
        let overtake = &map["overtake"].scenario;
        assert_eq!(overtake.initial.vehicles[1].v, 5.0);
        assert_eq!(overtake.initial.vehicles[0].v, 0.0);
    }

    #[test]
    fn every_builtin_scenario_validates() {
        for (name, entry) in builtin_scenarios() {
            let errs = validate_scenario(entry.scenario.clone()).err();
            assert!(errs.is_none(), "{name}: {errs:?}");
        }
    }
}
