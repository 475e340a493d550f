//! Subcommand implementations, shared by the binary and the test suites.

use crate::config::{parse_config, ConfigError};
use crate::output;
use idm_core::{
    builtin_scenarios, build_run_report, compute_bounds_for_scenario, compute_metrics,
    epsilon_sweep, integrate, validate_scenario, ModelParams, RunReport, Scenario, Termination,
    Trajectory, ValidationError, Variant, VariantConfig,
};
use rayon::prelude::*;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error at {0}")]
    Config(#[from] ConfigError),
    #[error("invalid scenario:\n{}", format_validation(.0))]
    Invalid(Vec<ValidationError>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_validation(errs: &[ValidationError]) -> String {
    errs.iter()
        .map(|e| format!("  - {e}"))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Common per-run flag overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub variant: Option<String>,
    pub horizon: Option<f64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

/// Variant selection by CLI name, with the defaults used throughout the
/// comparison runs: `a_min = a`, `eps_v = 0.1`, `eps_d = s0 / 4`.
pub fn variant_by_name(name: &str, p: &ModelParams) -> Result<VariantConfig, CliError> {
    let variant = match name {
        "classic" => Variant::Classic,
        "velocity-projected" => Variant::VelocityProjected,
        "acceleration-projected" => Variant::AccelerationProjected { a_min: p.a },
        "velocity-regularized" => Variant::VelocityRegularized { eps_v: 0.1 },
        "distance-regularized" => Variant::DistanceRegularized { eps_d: p.s0 / 4.0 },
        "discontinuous" => Variant::Discontinuous,
        other => {
            return Err(CliError::Usage(format!(
                "unknown variant `{other}` (expected classic, velocity-projected, \
                 acceleration-projected, velocity-regularized, distance-regularized \
                 or discontinuous)"
            )))
        }
    };
    Ok(VariantConfig::new(variant))
}

/// Resolve `--scenario` as a catalog name first, then as a file path.
pub fn resolve_scenario(spec: &str, ov: &Overrides) -> Result<Scenario, CliError> {
    let catalog = builtin_scenarios();
    let mut scenario = if let Some(entry) = catalog.get(spec) {
        entry.scenario.clone()
    } else {
        let path = Path::new(spec);
        if !path.exists() {
            return Err(CliError::Usage(format!(
                "`{spec}` is neither a built-in scenario nor an existing file \
                 (see `idm list-scenarios`)"
            )));
        }
        parse_config(&fs::read_to_string(path)?)?
    };

    if let Some(name) = &ov.variant {
        scenario.variant = variant_by_name(name, &scenario.params)?;
    }
    if let Some(h) = ov.horizon {
        scenario.horizon = h;
    }
    if let Some(r) = ov.rel_tol {
        scenario.solver.rel_tol = r;
    }
    if let Some(a) = ov.abs_tol {
        scenario.solver.abs_tol = a;
    }
    validate_scenario(scenario).map_err(CliError::Invalid)
}

pub fn exit_code(t: &Termination) -> i32 {
    match t {
        Termination::Completed => 0,
        _ => 2,
    }
}

pub struct RunArtifacts {
    pub trajectory: Trajectory,
    pub report: RunReport,
    pub files: Vec<PathBuf>,
}

/// Integrate one scenario and write `positions.csv`, `velocities.csv`,
/// `accelerations.csv` and `report.txt` into `out_dir`.
pub fn cmd_run(
    scenario: &Scenario,
    out_dir: &Path,
    round: Option<usize>,
) -> Result<RunArtifacts, CliError> {
    let trajectory = integrate(scenario).map_err(|e| CliError::Invalid(e.0))?;
    let report = build_run_report(scenario, &trajectory);

    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();
    for (name, content) in [
        ("positions.csv", output::positions_csv(&trajectory)),
        ("velocities.csv", output::velocities_csv(&trajectory)),
        ("accelerations.csv", output::accelerations_csv(&trajectory)),
        ("report.txt", output::render_report(&report, round)),
    ] {
        let path = out_dir.join(name);
        fs::write(&path, content)?;
        files.push(path);
    }
    Ok(RunArtifacts {
        trajectory,
        report,
        files,
    })
}

/// One comparison row: variant, scenario, mean leader-follower distance and
/// its variance (time-weighted).
pub type CompareRow = (String, String, f64, f64);

/// Run every (variant, scenario) combination and collect the distance
/// statistics of the published comparison table. Member runs execute in
/// parallel; the row order is the deterministic input order.
pub fn compare_rows(
    variant_names: &[String],
    scenario_names: &[String],
) -> Result<Vec<CompareRow>, CliError> {
    let mut jobs = Vec::new();
    for v in variant_names {
        for sc in scenario_names {
            jobs.push((v.clone(), sc.clone()));
        }
    }
    // validate eagerly so errors carry the offending names
    for (v, sc) in &jobs {
        let mut ov = Overrides::default();
        ov.variant = Some(v.clone());
        resolve_scenario(sc, &ov)
            .map_err(|e| CliError::Usage(format!("{v} / {sc}: {e}")))?;
    }
    let rows: Vec<Result<CompareRow, String>> = jobs
        .par_iter()
        .map(|(v, sc)| {
            let mut ov = Overrides::default();
            ov.variant = Some(v.clone());
            let scenario = resolve_scenario(sc, &ov).map_err(|e| e.to_string())?;
            let tr = integrate(&scenario).map_err(|e| format!("{v} / {sc}: {e}"))?;
            let m = compute_metrics(&tr, (0, 1), scenario.params.l)
                .map_err(|e| format!("{v} / {sc}: {e}"))?;
            Ok((
                v.clone(),
                sc.clone(),
                m.avg_gap + scenario.params.l,
                m.gap_variance,
            ))
        })
        .collect();
    rows.into_iter()
        .map(|r| r.map_err(CliError::Usage))
        .collect()
}

pub fn cmd_compare(
    variant_names: &[String],
    scenario_names: &[String],
    out_dir: &Path,
) -> Result<(Vec<CompareRow>, PathBuf), CliError> {
    let rows = compare_rows(variant_names, scenario_names)?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("compare.csv");
    fs::write(&path, output::compare_csv(&rows))?;
    Ok((rows, path))
}

/// Parse `--eps` as either a comma list or a `start:step:end` range.
pub fn parse_eps_spec(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = |what: &str| CliError::Usage(format!("bad --eps value `{spec}`: {what}"));
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("range must be start:step:end"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("start"))?;
        let step: f64 = parts[1].trim().parse().map_err(|_| bad("step"))?;
        let end: f64 = parts[2].trim().parse().map_err(|_| bad("end"))?;
        if !(step > 0.0) {
            return Err(bad("step must be positive"));
        }
        let mut out = Vec::new();
        let mut k = 0;
        loop {
            let v = start + step * k as f64;
            if v > end + 1e-12 * step {
                break;
            }
            out.push(v);
            k += 1;
        }
        Ok(out)
    } else {
        spec.split(',')
            .map(|item| {
                item.trim()
                    .parse::<f64>()
                    .map_err(|_| bad(&format!("`{}` is not a number", item.trim())))
            })
            .collect()
    }
}

pub type SweepRow = (f64, Option<f64>, f64);

pub fn sweep_rows(base: &Scenario, eps_values: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    for &eps in eps_values {
        if !(eps > 0.0) {
            return Err(CliError::Usage(format!(
                "eps values must be positive gaps, got {eps}"
            )));
        }
    }
    let rows: Vec<Result<SweepRow, String>> = eps_values
        .par_iter()
        .map(|&eps| {
            let metrics = epsilon_sweep(base, &[eps])
                .map_err(|e| format!("eps = {eps}: {e}"))?
                .remove(0)
                .1;
            Ok((eps, metrics.t_recover_positive_v, metrics.min_velocity))
        })
        .collect();
    rows.into_iter()
        .map(|r| r.map_err(CliError::Usage))
        .collect()
}

pub fn cmd_sweep(
    base: &Scenario,
    eps_values: &[f64],
    out_dir: &Path,
) -> Result<(Vec<SweepRow>, PathBuf), CliError> {
    let rows = sweep_rows(base, eps_values)?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("sweep.csv");
    fs::write(&path, output::sweep_csv(&rows))?;
    Ok((rows, path))
}

/// The printed bounds record for `idm bounds`.
pub fn bounds_text(scenario: &Scenario) -> String {
    let b = compute_bounds_for_scenario(scenario);
    format!(
        "v_max             = {}\n\
         delta*            = {}\n\
         eps0* (statement) = {}\n\
         eps0* (proof)     = {}\n\
         safe distancing   = {}\n\
         global wellposed  = {}\n",
        b.v_max,
        b.delta_star,
        b.eps0_star,
        b.eps0_star_proof_variant,
        b.safe_distancing_ok,
        b.global_wellposed_ok
    )
}

pub fn list_text() -> String {
    let mut out = String::new();
    for (name, entry) in builtin_scenarios() {
        out.push_str(&format!("{name:<17} {}\n", entry.summary));
    }
    out
}
