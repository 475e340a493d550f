//! Car-following simulation engine for the intelligent driver model (IDM).
//!
//! The crate covers three layers:
//!
//! * acceleration laws: the classic IDM acceleration, the free-flow law and
//!   the modified variants (velocity/acceleration projection, velocity- and
//!   distance-regularized saturations, and the discontinuous stop-hold model),
//! * platoon dynamics: the coupled leader + follower ODE right-hand side for
//!   an arbitrary number of vehicles, including the hybrid mode logic of the
//!   discontinuous variant,
//! * numerics and analysis: an adaptive Dormand-Prince 5(4) integrator with
//!   dense output, event location and finite-time blow-up detection, a
//!   fixed-step RK4 reference oracle, and post-processing (trajectory metrics,
//!   theoretical safe-distance bounds, run classification).

pub mod accel;
pub mod analysis;
pub mod catalog;
pub mod leader;
pub mod params;
pub mod platoon;
pub mod scenario;
pub mod solver;
pub mod state;

pub use accel::{
    free_flow_accel, h_saturation, h_tilde_saturation, idm_accel, variant_accel, AccelInput,
    DomainViolation,
};
pub use analysis::{
    build_run_report, classify_run, compute_bounds, compute_bounds_for_scenario, compute_metrics,
    epsilon_sweep, run_invariant_checks, ConditionFlags, InvariantCheck, MetricsError,
    ObservedConclusions, RunClassification, RunMetrics, RunReport, TheoreticalBounds,
};
pub use catalog::{builtin_scenarios, ScenarioEntry};
pub use leader::LeaderProfile;
pub use params::{ModelParams, Variant, VariantConfig};
pub use platoon::{eval_rhs, leader_accel, update_modes, RhsEvaluation};
pub use scenario::{validate_scenario, InvalidScenario, Scenario, ValidationError};
pub use solver::{
    integrate, locate_event, reference_integrate, Event, EventKind, LocateError, Sample,
    SolverSettings, Termination, Trajectory,
};
pub use state::{Mode, PlatoonState, VehicleState};
