//! CSV emission and the human-readable run report.

use idm_core::{InvariantCheck, RunMetrics, RunReport, Termination, Trajectory};
use std::fmt::Write as _;

/// Full-precision decimal serialization: 17 significant digits round-trips
/// every f64 bit-exactly.
pub fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_rounded(x: f64, round: Option<usize>) -> String {
    match round {
        Some(n) => format!("{x:.n$}"),
        None => format!("{x}"),
    }
}

fn fmt_opt(x: Option<f64>, round: Option<usize>) -> String {
    match x {
        Some(v) => fmt_rounded(v, round),
        None => "-".to_string(),
    }
}

/// One CSV per state column family: `t, <prefix>_1 ... <prefix>_N` with the
/// leader in column 1.
fn state_csv<F>(tr: &Trajectory, prefix: &str, value: F) -> String
where
    F: Fn(&idm_core::Sample, usize) -> f64,
{
    let n = tr
        .samples
        .first()
        .map(|s| s.state.vehicles.len())
        .unwrap_or(0);
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        let _ = write!(out, ",{prefix}_{i}");
    }
    out.push('\n');
    for s in &tr.samples {
        out.push_str(&fmt_full(s.t()));
        for i in 0..n {
            out.push(',');
            out.push_str(&fmt_full(value(s, i)));
        }
        out.push('\n');
    }
    out
}

pub fn positions_csv(tr: &Trajectory) -> String {
    state_csv(tr, "x", |s, i| s.state.vehicles[i].x)
}

pub fn velocities_csv(tr: &Trajectory) -> String {
    state_csv(tr, "v", |s, i| s.state.vehicles[i].v)
}

pub fn accelerations_csv(tr: &Trajectory) -> String {
    state_csv(tr, "a", |s, i| s.accel[i])
}

pub fn termination_label(t: &Termination) -> String {
    match t {
        Termination::Completed => "completed".to_string(),
        Termination::Blowup { t_est } => format!("blow-up (t_est = {t_est})"),
        Termination::GapCollapse { t } => format!("gap-collapse (t = {t})"),
        Termination::LeaderVelocityNegative { t } => {
            format!("leader-velocity-negative (t = {t})")
        }
        Termination::StepLimitReached => "step-limit-reached".to_string(),
    }
}

fn metrics_block(out: &mut String, m: &RunMetrics, round: Option<usize>) {
    let _ = writeln!(out, "metrics (leader, first follower):");
    let _ = writeln!(out, "  avg net gap        = {}", fmt_rounded(m.avg_gap, round));
    let _ = writeln!(out, "  gap variance       = {}", fmt_rounded(m.gap_variance, round));
    let _ = writeln!(out, "  min net gap        = {}", fmt_rounded(m.min_gap, round));
    let _ = writeln!(out, "  min velocity       = {}", fmt_rounded(m.min_velocity, round));
    let _ = writeln!(out, "  t first negative v = {}", fmt_opt(m.t_first_negative_v, round));
    let _ = writeln!(out, "  t recover v > 0    = {}", fmt_opt(m.t_recover_positive_v, round));
    let _ = writeln!(out, "  t blow-up estimate = {}", fmt_opt(m.t_blowup_est, round));
}

fn check_line(c: &InvariantCheck) -> String {
    let status = match c.passed {
        Some(true) => "pass",
        Some(false) => "FAIL",
        None => "n/a ",
    };
    format!("  [{status}] {:<32} {}", c.name, c.details)
}

/// Render `report.txt`. `round` trims numbers for human reading; `None`
/// prints shortest round-trip representations.
pub fn render_report(report: &RunReport, round: Option<usize>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "termination: {}", termination_label(&report.termination));
    out.push('\n');
    if let Some(m) = &report.metrics {
        metrics_block(&mut out, m, round);
        out.push('\n');
    }
    let b = &report.bounds;
    let _ = writeln!(out, "theoretical bounds:");
    let _ = writeln!(out, "  v_max                = {}", fmt_rounded(b.v_max, round));
    let _ = writeln!(out, "  delta*               = {}", fmt_rounded(b.delta_star, round));
    let _ = writeln!(out, "  eps0* (statement)    = {}", fmt_rounded(b.eps0_star, round));
    let _ = writeln!(
        out,
        "  eps0* (proof)        = {}",
        fmt_rounded(b.eps0_star_proof_variant, round)
    );
    let _ = writeln!(out, "  safe distancing ok   = {}", b.safe_distancing_ok);
    let _ = writeln!(out, "  global wellposed ok  = {}", b.global_wellposed_ok);
    out.push('\n');

    let c = &report.classification;
    let _ = writeln!(out, "classification:");
    let _ = writeln!(out, "  leader free-flow             = {}", c.conditions.leader_free_flow);
    let _ = writeln!(out, "  delta even integer           = {}", c.conditions.delta_even_integer);
    let _ = writeln!(
        out,
        "  v0 > v_l0 > 0 and gap = s0   = {}",
        c.conditions.equilibrium_initial_condition
    );
    let _ = writeln!(out, "  safe distancing              = {}", c.conditions.safe_distancing);
    let _ = writeln!(out, "  global s0 condition          = {}", c.conditions.global_s0_condition);
    let _ = writeln!(
        out,
        "  initial gap > eps0*          = {}",
        c.conditions.initial_gap_above_eps0_star
    );
    let _ = writeln!(
        out,
        "  velocity equilibrium t1      = {}",
        fmt_opt(c.observed.velocity_equilibrium_t1, round)
    );
    let _ = writeln!(
        out,
        "  gap never below eps0*        = {}",
        c.observed
            .gap_never_below_eps0_star
            .map(|b| b.to_string())
            .unwrap_or_else(|| "-".to_string())
    );
    let _ = writeln!(
        out,
        "  no negative follower v       = {}",
        c.observed.no_negative_follower_velocity
    );
    let _ = writeln!(
        out,
        "  min net gap observed         = {}",
        fmt_rounded(c.observed.min_net_gap, round)
    );
    let _ = writeln!(
        out,
        "  min follower v observed      = {}",
        fmt_rounded(c.observed.min_follower_velocity, round)
    );
    out.push('\n');

    let _ = writeln!(out, "invariant checks:");
    for check in &report.checks {
        let _ = writeln!(out, "{}", check_line(check));
    }
    out
}

/// `compare.csv`: one row per (variant, scenario) with the distance
/// statistics that mirror the published comparison table. The distance is
/// the gross leader-follower distance `x_l - x` (net gap + vehicle length);
/// its variance coincides with the net-gap variance.
pub fn compare_csv(rows: &[(String, String, f64, f64)]) -> String {
    let mut out = String::from("variant,scenario,avg_distance,distance_variance\n");
    for (variant, scenario, avg, var) in rows {
        let _ = writeln!(out, "{variant},{scenario},{},{}", fmt_full(*avg), fmt_full(*var));
    }
    out
}

/// `sweep.csv`: eps, recovery time (0 when no negative phase), min velocity.
pub fn sweep_csv(rows: &[(f64, Option<f64>, f64)]) -> String {
    let mut out = String::from("eps,t_recover_positive_v,min_velocity\n");
    for (eps, t_rec, min_v) in rows {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_full(*eps),
            fmt_full(t_rec.unwrap_or(0.0)),
            fmt_full(*min_v)
        );
    }
    out
}
