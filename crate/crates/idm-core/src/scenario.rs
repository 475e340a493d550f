//! Scenario assembly and validation.

use crate::leader::LeaderProfile;
use crate::params::{ModelParams, Variant, VariantConfig};
use crate::solver::SolverSettings;
use crate::state::PlatoonState;
use thiserror::Error;

/// A complete simulation setup: parameters, variant, leader profile, initial
/// platoon datum, time horizon and solver settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub params: ModelParams,
    pub variant: VariantConfig,
    pub leader: LeaderProfile,
    pub initial: PlatoonState,
    pub horizon: f64,
    pub solver: SolverSettings,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },
    #[error("delta must be greater than one, got {value}")]
    DeltaNotGreaterThanOne { value: f64 },
    #[error("vehicles {lead} and {follow}: spacing {distance} does not exceed the vehicle length {l}")]
    GapNotExceedingLength {
        lead: usize,
        follow: usize,
        distance: f64,
        l: f64,
    },
    #[error("initial velocity of vehicle {index} is negative ({value})")]
    NegativeInitialVelocity { index: usize, value: f64 },
    #[error("time headway tau = {tau} must be smaller than the horizon {horizon}")]
    TauExceedsHorizon { tau: f64, horizon: f64 },
    #[error("eps_d = {eps_d} must be smaller than the minimum spacing s0 = {s0}")]
    EpsDNotBelowMinSpacing { eps_d: f64, s0: f64 },
    #[error("scenario has no vehicles")]
    EmptyPlatoon,
    #[error("solver step bounds must satisfy 0 < dt_min <= dt_init <= dt_max, got ({dt_min}, {dt_init}, {dt_max})")]
    BadStepBounds {
        dt_min: f64,
        dt_init: f64,
        dt_max: f64,
    },
}

/// Wrapper error for operations that require a valid scenario up front.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid scenario: {0:?}")]
pub struct InvalidScenario(pub Vec<ValidationError>);

/// Collect every violated invariant (not just the first).
pub fn validation_errors(s: &Scenario) -> Vec<ValidationError> {
    let mut errs = Vec::new();
    let p = &s.params;

    let positive: [(&'static str, f64); 5] = [
        ("a", p.a),
        ("b", p.b),
        ("v_free", p.v_free),
        ("s0", p.s0),
        ("l", p.l),
    ];
    for (name, value) in positive {
        if !(value > 0.0) {
            errs.push(ValidationError::NonPositiveParameter { name, value });
        }
    }
    if !(p.tau > 0.0) {
        errs.push(ValidationError::NonPositiveParameter {
            name: "tau",
            value: p.tau,
        });
    }
    if !(p.delta > 1.0) {
        errs.push(ValidationError::DeltaNotGreaterThanOne { value: p.delta });
    }
    if !(s.horizon >= 0.0) {
        errs.push(ValidationError::NonPositiveParameter {
            name: "horizon",
            value: s.horizon,
        });
    }
    // tau < T; a zero horizon is the degenerate "initial sample only" run and
    // is exempt so that `--horizon 0` stays usable for any parameter set.
    if s.horizon > 0.0 && p.tau >= s.horizon {
        errs.push(ValidationError::TauExceedsHorizon {
            tau: p.tau,
            horizon: s.horizon,
        });
    }

    match s.variant.variant {
        Variant::AccelerationProjected { a_min } => {
            if !(a_min > 0.0) {
                errs.push(ValidationError::NonPositiveParameter {
                    name: "a_min",
                    value: a_min,
                });
            }
        }
        Variant::VelocityRegularized { eps_v } => {
            if !(eps_v > 0.0) {
                errs.push(ValidationError::NonPositiveParameter {
                    name: "eps_v",
                    value: eps_v,
                });
            }
        }
        Variant::DistanceRegularized { eps_d } => {
            if !(eps_d > 0.0) {
                errs.push(ValidationError::NonPositiveParameter {
                    name: "eps_d",
                    value: eps_d,
                });
            } else if eps_d >= p.s0 {
                errs.push(ValidationError::EpsDNotBelowMinSpacing { eps_d, s0: p.s0 });
            }
        }
        _ => {}
    }

    if s.initial.is_empty() {
        errs.push(ValidationError::EmptyPlatoon);
    }
    for (i, v) in s.initial.vehicles.iter().enumerate() {
        if !(v.v >= 0.0) {
            errs.push(ValidationError::NegativeInitialVelocity {
                index: i + 1,
                value: v.v,
            });
        }
    }
    for i in 1..s.initial.vehicles.len() {
        let distance = s.initial.vehicles[i - 1].x - s.initial.vehicles[i].x;
        if !(distance > p.l) {
            errs.push(ValidationError::GapNotExceedingLength {
                lead: i,
                follow: i + 1,
                distance,
                l: p.l,
            });
        }
    }

    let sv = &s.solver;
    if !(sv.dt_min > 0.0 && sv.dt_min <= sv.dt_init && sv.dt_init <= sv.dt_max) {
        errs.push(ValidationError::BadStepBounds {
            dt_min: sv.dt_min,
            dt_init: sv.dt_init,
            dt_max: sv.dt_max,
        });
    }
    for (name, value) in [
        ("rel_tol", sv.rel_tol),
        ("abs_tol", sv.abs_tol),
        ("event_tol", sv.event_tol),
        ("blowup_speed_threshold", sv.blowup_speed_threshold),
    ] {
        if !(value > 0.0) {
            errs.push(ValidationError::NonPositiveParameter { name, value });
        }
    }
    if sv.max_steps == 0 {
        errs.push(ValidationError::NonPositiveParameter {
            name: "max_steps",
            value: 0.0,
        });
    }

    errs
}

/// Returns the scenario unchanged iff every invariant holds, otherwise the
/// complete list of violations. Idempotent by construction.
pub fn validate_scenario(s: Scenario) -> Result<Scenario, Vec<ValidationError>> {
    let errs = validation_errors(&s);
    if errs.is_empty() {
        Ok(s)
    } else {
        Err(errs)
    }
}
