//! Line-oriented scenario configuration files.
//!
//! Format: `[section]` headers with `key = value` entries; `#` starts a
//! comment. Sections mirror the domain types field-for-field:
//!
//! ```text
//! [params]    a, b, v_free, tau, s0, l, delta        (all required)
//! [variant]   variant, a_min | eps_v | eps_d, signed_power_term
//! [leader]    profile, u | schedule | amplitude, threshold, angular_divisor
//! [initial]   x, v                                    (comma lists, leader first)
//! [run]       horizon                                 (required)
//! [solver]    rel_tol, abs_tol, dt_init, dt_min, dt_max,
//!             blowup_speed_threshold, event_tol, max_steps
//! ```
//!
//! Velocity-valued entries (`v_free`, the `[initial]` v list) accept an
//! explicit `km/h` or `m/s` suffix; bare numbers are SI. Unknown keys are a
//! hard error, as are variant keys that do not belong to the selected
//! variant.

use idm_core::{
    LeaderProfile, ModelParams, PlatoonState, Scenario, SolverSettings, Variant, VariantConfig,
    VehicleState,
};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        line,
        message: message.into(),
    })
}

#[derive(Debug, Clone)]
struct Entry {
    line: usize,
    value: String,
}

#[derive(Debug, Default)]
struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>, ConfigError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let Some(name) = name.strip_suffix(']') else {
                return err(line_no, format!("malformed section header `{}`", raw.trim()));
            };
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                return err(line_no, format!("duplicate section [{name}]"));
            }
            sections.insert(
                name.clone(),
                Section {
                    line: line_no,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return err(line_no, format!("expected `key = value`, got `{line}`"));
        };
        let Some(section) = current.as_ref() else {
            return err(line_no, "entry before any [section] header");
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let entries = &mut sections.get_mut(section).unwrap().entries;
        if entries.contains_key(&key) {
            return err(line_no, format!("duplicate key `{key}` in [{section}]"));
        }
        entries.insert(
            key,
            Entry {
                line: line_no,
                value,
            },
        );
    }
    Ok(sections)
}

fn parse_f64(e: &Entry) -> Result<f64, ConfigError> {
    e.value
        .parse::<f64>()
        .map_err(|_| ConfigError {
            line: e.line,
            message: format!("`{}` is not a number", e.value),
        })
}

/// A velocity value, optionally suffixed with `km/h` or `m/s`.
fn parse_velocity(e: &Entry) -> Result<f64, ConfigError> {
    let v = e.value.trim();
    let (num, factor) = if let Some(stripped) = v.strip_suffix("km/h") {
        (stripped.trim(), 1.0 / 3.6)
    } else if let Some(stripped) = v.strip_suffix("m/s") {
        (stripped.trim(), 1.0)
    } else {
        (v, 1.0)
    };
    num.parse::<f64>()
        .map(|x| x * factor)
        .map_err(|_| ConfigError {
            line: e.line,
            message: format!("`{}` is not a velocity (number with optional km/h or m/s)", e.value),
        })
}

fn parse_bool(e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => err(e.line, format!("`{other}` is not a boolean")),
    }
}

fn parse_usize(e: &Entry) -> Result<usize, ConfigError> {
    e.value.parse::<usize>().map_err(|_| ConfigError {
        line: e.line,
        message: format!("`{}` is not a nonnegative integer", e.value),
    })
}

struct SectionReader<'a> {
    name: &'a str,
    section: Option<&'a Section>,
    taken: Vec<String>,
}

impl<'a> SectionReader<'a> {
    fn new(name: &'a str, sections: &'a BTreeMap<String, Section>) -> Self {
        SectionReader {
            name,
            section: sections.get(name),
            taken: Vec::new(),
        }
    }

    fn get(&mut self, key: &str) -> Option<&'a Entry> {
        self.taken.push(key.to_string());
        self.section.and_then(|s| s.entries.get(key))
    }

    fn require(&mut self, key: &str) -> Result<&'a Entry, ConfigError> {
        let line = self.section.map(|s| s.line).unwrap_or(0);
        let name = self.name;
        self.get(key).ok_or(ConfigError {
            line,
            message: format!("missing required key `{key}` in [{name}]"),
        })
    }

    /// Every key in the section must have been consumed.
    fn finish(self) -> Result<(), ConfigError> {
        if let Some(s) = self.section {
            for (key, entry) in &s.entries {
                if !self.taken.contains(key) {
                    return err(
                        entry.line,
                        format!("unknown key `{key}` in [{}]", self.name),
                    );
                }
            }
        }
        Ok(())
    }
}

fn parse_schedule(e: &Entry) -> Result<Vec<(f64, f64)>, ConfigError> {
    let mut out = Vec::new();
    for item in e.value.split(',') {
        let item = item.trim();
        if item.is_empty() {
            continue;
        }
        let Some((t, u)) = item.split_once(':') else {
            return err(e.line, format!("schedule entry `{item}` is not `t:accel`"));
        };
        let t: f64 = t.trim().parse().map_err(|_| ConfigError {
            line: e.line,
            message: format!("schedule time `{t}` is not a number"),
        })?;
        let u: f64 = u.trim().parse().map_err(|_| ConfigError {
            line: e.line,
            message: format!("schedule accel `{u}` is not a number"),
        })?;
        out.push((t, u));
    }
    if !out.windows(2).all(|w| w[0].0 <= w[1].0) {
        return err(e.line, "schedule times must be nondecreasing");
    }
    Ok(out)
}

/// Parse a full scenario configuration document.
pub fn parse_config(text: &str) -> Result<Scenario, ConfigError> {
    let sections = split_sections(text)?;
    for name in sections.keys() {
        if !["params", "variant", "leader", "initial", "run", "solver"].contains(&name.as_str()) {
            return err(sections[name].line, format!("unknown section [{name}]"));
        }
    }

    let mut params_r = SectionReader::new("params", &sections);
    if params_r.section.is_none() {
        return err(0, "missing required section [params]");
    }
    let params = ModelParams {
        a: parse_f64(params_r.require("a")?)?,
        b: parse_f64(params_r.require("b")?)?,
        v_free: parse_velocity(params_r.require("v_free")?)?,
        tau: parse_f64(params_r.require("tau")?)?,
        s0: parse_f64(params_r.require("s0")?)?,
        l: parse_f64(params_r.require("l")?)?,
        delta: parse_f64(params_r.require("delta")?)?,
    };
    params_r.finish()?;

    let mut variant_r = SectionReader::new("variant", &sections);
    let variant = if variant_r.section.is_some() {
        let kind = variant_r.require("variant")?;
        let v = match kind.value.as_str() {
            "classic" => Variant::Classic,
            "velocity-projected" => Variant::VelocityProjected,
            "acceleration-projected" => Variant::AccelerationProjected {
                a_min: parse_f64(variant_r.require("a_min")?)?,
            },
            "velocity-regularized" => Variant::VelocityRegularized {
                eps_v: parse_f64(variant_r.require("eps_v")?)?,
            },
            "distance-regularized" => Variant::DistanceRegularized {
                eps_d: parse_f64(variant_r.require("eps_d")?)?,
            },
            "discontinuous" => Variant::Discontinuous,
            other => {
                return err(kind.line, format!("unknown variant `{other}`"));
            }
        };
        let signed = match variant_r.get("signed_power_term") {
            Some(e) => parse_bool(e)?,
            None => false,
        };
        variant_r.finish()?; // rejects keys of non-selected variants
        VariantConfig {
            variant: v,
            signed_power_term: signed,
        }
    } else {
        VariantConfig::classic()
    };

    let mut leader_r = SectionReader::new("leader", &sections);
    if leader_r.section.is_none() {
        return err(0, "missing required section [leader]");
    }
    let profile_e = leader_r.require("profile")?;
    let leader = match profile_e.value.as_str() {
        "constant-accel" => LeaderProfile::ConstantAccel {
            u: parse_f64(leader_r.require("u")?)?,
        },
        "free-flow" => LeaderProfile::FreeFlow,
        "piecewise-constant" => LeaderProfile::PiecewiseConstant {
            schedule: parse_schedule(leader_r.require("schedule")?)?,
        },
        "stop-and-go-sine" => LeaderProfile::StopAndGoSine {
            amplitude: parse_f64(leader_r.require("amplitude")?)?,
            threshold: match leader_r.get("threshold") {
                Some(e) => parse_f64(e)?,
                None => 0.8,
            },
            angular_divisor: match leader_r.get("angular_divisor") {
                Some(e) => parse_f64(e)?,
                None => 4.0,
            },
        },
        other => {
            return err(profile_e.line, format!("unknown leader profile `{other}`"));
        }
    };
    leader_r.finish()?;

    let mut initial_r = SectionReader::new("initial", &sections);
    if initial_r.section.is_none() {
        return err(0, "missing required section [initial]");
    }
    let xs_e = initial_r.require("x")?;
    let vs_e = initial_r.require("v")?;
    let xs: Vec<f64> = {
        let mut out = Vec::new();
        for item in xs_e.value.split(',') {
            out.push(item.trim().parse::<f64>().map_err(|_| ConfigError {
                line: xs_e.line,
                message: format!("`{}` is not a number", item.trim()),
            })?);
        }
        out
    };
    let vs: Vec<f64> = {
        let mut out = Vec::new();
        for item in vs_e.value.split(',') {
            out.push(parse_velocity(&Entry {
                line: vs_e.line,
                value: item.trim().to_string(),
            })?);
        }
        out
    };
    if xs.len() != vs.len() {
        return err(
            vs_e.line,
            format!("{} positions but {} velocities", xs.len(), vs.len()),
        );
    }
    initial_r.finish()?;
    let initial = PlatoonState::new(
        0.0,
        xs.iter()
            .zip(&vs)
            .map(|(&x, &v)| VehicleState::new(x, v))
            .collect(),
    );

    let mut run_r = SectionReader::new("run", &sections);
    if run_r.section.is_none() {
        return err(0, "missing required section [run]");
    }
    let horizon = parse_f64(run_r.require("horizon")?)?;
    run_r.finish()?;

    let mut solver_r = SectionReader::new("solver", &sections);
    let mut solver = SolverSettings::defaults_for(params.v_free);
    if solver_r.section.is_some() {
        if let Some(e) = solver_r.get("rel_tol") {
            solver.rel_tol = parse_f64(e)?;
        }
        if let Some(e) = solver_r.get("abs_tol") {
            solver.abs_tol = parse_f64(e)?;
        }
        if let Some(e) = solver_r.get("dt_init") {
            solver.dt_init = parse_f64(e)?;
        }
        if let Some(e) = solver_r.get("dt_min") {
            solver.dt_min = parse_f64(e)?;
        }
        if let Some(e) = solver_r.get("dt_max") {
            solver.dt_max = parse_f64(e)?;
        }
        if let Some(e) = solver_r.get("blowup_speed_threshold") {
            solver.blowup_speed_threshold = parse_f64(e)?;
        }
        if let Some(e) = solver_r.get("event_tol") {
            solver.event_tol = parse_f64(e)?;
        }
        if let Some(e) = solver_r.get("max_steps") {
            solver.max_steps = parse_usize(e)?;
        }
    }
    solver_r.finish()?;

    Ok(Scenario {
        params,
        variant,
        leader,
        initial,
        horizon,
        solver,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# counterexample setup
[params]
a = 1.0
b = 2.0
v_free = 1.0
tau = 1.6
s0 = 2.0
l = 4.0
delta = 4.0

[leader]
profile = free-flow

[initial]
x = 5.5, 0.0
v = 0.0, 0.0

[run]
horizon = 3.0
";

    #[test]
    fn parses_a_minimal_document() {
        let s = parse_config(GOOD).unwrap();
        assert_eq!(s.params.a, 1.0);
        assert_eq!(s.initial.vehicles.len(), 2);
        assert_eq!(s.horizon, 3.0);
        assert_eq!(s.variant, VariantConfig::classic());
    }

    #[test]
    fn km_h_suffix_converts() {
        let text = GOOD.replace("v_free = 1.0", "v_free = 120 km/h");
        let s = parse_config(&text).unwrap();
        assert!((s.params.v_free - 120.0 / 3.6).abs() < 1e-12);
    }

    #[test]
    fn unknown_key_is_an_error_with_its_line() {
        let text = GOOD.replace("tau = 1.6", "tau = 1.6\nbogus = 1");
        let e = parse_config(&text).unwrap_err();
        assert!(e.message.contains("bogus"), "{e}");
        assert_eq!(e.line, 6);
    }

    #[test]
    fn missing_required_param_is_an_error() {
        let text = GOOD.replace("s0 = 2.0\n", "");
        let e = parse_config(&text).unwrap_err();
        assert!(e.message.contains("s0"), "{e}");
    }

    #[test]
    fn variant_keys_must_match_the_selected_variant() {
        let text = format!("{GOOD}\n[variant]\nvariant = classic\neps_v = 0.1\n");
        let e = parse_config(&text).unwrap_err();
        assert!(e.message.contains("eps_v"), "{e}");

        let text = format!("{GOOD}\n[variant]\nvariant = velocity-regularized\n");
        let e = parse_config(&text).unwrap_err();
        assert!(e.message.contains("eps_v"), "{e}");
    }

    #[test]
    fn schedule_parsing() {
        let text = GOOD.replace(
            "profile = free-flow",
            "profile = piecewise-constant\nschedule = 0:1.0, 2:0.0, 5:-1.0",
        );
        let s = parse_config(&text).unwrap();
        match s.leader {
            LeaderProfile::PiecewiseConstant { schedule } => {
                assert_eq!(schedule, vec![(0.0, 1.0), (2.0, 0.0), (5.0, -1.0)]);
            }
            other => panic!("{other:?}"),
        }
    }
}
