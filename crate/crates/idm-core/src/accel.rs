//! Follower acceleration laws: the classic IDM and its modified variants.

use crate::params::{ModelParams, Variant, VariantConfig};
use crate::state::Mode;
use thiserror::Error;

/// Kinematic input of one follower/leader pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccelInput {
    /// Follower position.
    pub x: f64,
    /// Follower velocity.
    pub v: f64,
    /// Leader position.
    pub x_l: f64,
    /// Leader velocity.
    pub v_l: f64,
}

impl AccelInput {
    /// Net bumper-to-bumper gap `x_l - x - l`.
    pub fn net_gap(&self, l: f64) -> f64 {
        self.x_l - self.x - l
    }
}

/// The input left the admissible set `x_l - x - l > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("net gap {gap} is not positive (x = {x}, x_l = {x_l}, l = {l})")]
pub struct DomainViolation {
    pub gap: f64,
    pub x: f64,
    pub x_l: f64,
    pub l: f64,
}

/// `(|v|/v_free)^delta`, optionally signed so that it counteracts negative
/// velocities. `0^delta = 0` and `sgn(0) = 0`.
fn power_term(p: &ModelParams, v: f64, signed: bool) -> f64 {
    let mag = (v.abs() / p.v_free).powf(p.delta);
    if signed {
        if v > 0.0 {
            mag
        } else if v < 0.0 {
            -mag
        } else {
            0.0
        }
    } else {
        mag
    }
}

/// The (unsquared) interaction quotient
/// `(2 sqrt(ab) (s0 + v tau) + v (v - v_l)) / (2 sqrt(ab) gap)`.
fn interaction_quotient(p: &ModelParams, v: f64, v_l: f64, gap: f64) -> f64 {
    let sab2 = 2.0 * (p.a * p.b).sqrt();
    (sab2 * (p.s0 + v * p.tau) + v * (v - v_l)) / (sab2 * gap)
}

fn check_domain(p: &ModelParams, input: AccelInput) -> Result<f64, DomainViolation> {
    let gap = input.x_l - input.x - p.l;
    if gap > 0.0 {
        Ok(gap)
    } else {
        Err(DomainViolation {
            gap,
            x: input.x,
            x_l: input.x_l,
            l: p.l,
        })
    }
}

/// Classic IDM car-following acceleration.
///
/// `a (1 - (|v|/v_free)^delta - ((2 sqrt(ab)(s0 + v tau) + v(v - v_l)) / (2 sqrt(ab) gap))^2)`
/// on the set `gap = x_l - x - l > 0`.
pub fn idm_accel(
    p: &ModelParams,
    input: AccelInput,
    signed_power: bool,
) -> Result<f64, DomainViolation> {
    let gap = check_domain(p, input)?;
    let quot = interaction_quotient(p, input.v, input.v_l, gap);
    Ok(p.a * (1.0 - power_term(p, input.v, signed_power) - quot * quot))
}

/// Free-flow acceleration `a (1 - (|v|/v_free)^delta)`, defined for all `v`.
pub fn free_flow_accel(p: &ModelParams, v: f64) -> f64 {
    p.a * (1.0 - power_term(p, v, false))
}

/// Velocity saturation: 0 for `v <= 0`, linear up to 1 at `v = eps_v`, then 1.
pub fn h_saturation(eps_v: f64, v: f64) -> f64 {
    (v / eps_v).clamp(0.0, 1.0)
}

/// Distance saturation: `eps_d/s0` for `gap <= eps_d`, linearly interpolated
/// to 1 at `gap = s0`, then 1. Equivalently `clamp(gap, eps_d, s0) / s0`,
/// since the linear branch has slope exactly `1/s0`.
pub fn h_tilde_saturation(eps_d: f64, s0: f64, gap: f64) -> f64 {
    gap.clamp(eps_d, s0) / s0
}

/// Follower acceleration for the selected variant.
///
/// `mode` is only consulted by the discontinuous variant; the stop branch is
/// latched there by the integrator between events.
pub fn variant_accel(
    p: &ModelParams,
    cfg: &VariantConfig,
    input: AccelInput,
    mode: Mode,
) -> Result<f64, DomainViolation> {
    let signed = cfg.signed_power_term;
    match cfg.variant {
        Variant::Classic => idm_accel(p, input, signed),
        Variant::VelocityProjected => {
            let projected = AccelInput {
                v: input.v.max(0.0),
                ..input
            };
            idm_accel(p, projected, signed)
        }
        Variant::AccelerationProjected { a_min } => {
            let gap = input.x_l - input.x - p.l;
            if gap <= 0.0 {
                // Continuous extension through the collapsed gap: the raw
                // acceleration diverges to -inf as gap -> 0+, so the clamp is
                // active and the model keeps braking at -a_min without
                // noticing the contact.
                return Ok(-a_min);
            }
            let projected = AccelInput {
                v: input.v.max(0.0),
                ..input
            };
            Ok(idm_accel(p, projected, signed)?.max(-a_min))
        }
        Variant::VelocityRegularized { eps_v } => {
            let gap = check_domain(p, input)?;
            let quot = interaction_quotient(p, input.v, input.v_l, gap);
            Ok(p.a
                * (1.0
                    - power_term(p, input.v, signed)
                    - h_saturation(eps_v, input.v) * quot * quot))
        }
        Variant::DistanceRegularized { eps_d } => {
            let gap = check_domain(p, input)?;
            let quot = interaction_quotient(p, input.v, input.v_l, gap);
            Ok(p.a
                * (1.0
                    - power_term(p, input.v, signed)
                    - h_tilde_saturation(eps_d, p.s0, gap) * quot * quot))
        }
        Variant::Discontinuous => {
            let gap = check_domain(p, input)?;
            if mode == Mode::Stopped {
                return Ok(0.0);
            }
            if input.v > 0.0 || gap >= p.s0 {
                idm_accel(p, input, signed)
            } else {
                // v <= 0 and gap < s0: the stop branch
                Ok(0.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_params() -> ModelParams {
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

    fn pair_input(gap: f64, v: f64, v_l: f64, l: f64) -> AccelInput {
        AccelInput {
            x: 0.0,
            v,
            x_l: l + gap,
            v_l,
        }
    }

    #[test]
    fn idm_accel_at_standstill_reduces_to_spacing_ratio() {
        // v = 0 kills both velocity terms: accel = a (1 - (s0/gap)^2).
        let p = fig2_params();
        let got = idm_accel(&p, pair_input(1.5, 0.0, 0.7, p.l), false).unwrap();
        assert!((got - (-7.0 / 9.0)).abs() < 1e-12, "got {got}");
        // the leader velocity is irrelevant at v = 0
        let other = idm_accel(&p, pair_input(1.5, 0.0, 123.0, p.l), false).unwrap();
        assert_eq!(got, other);
    }

    #[test]
    fn idm_accel_is_zero_at_standstill_with_gap_s0() {
        let p = fig2_params();
        let got = idm_accel(&p, pair_input(2.0, 0.0, 0.0, p.l), false).unwrap();
        assert!(got.abs() < 1e-15, "got {got}");
    }

    #[test]
    fn idm_accel_free_flow_equilibrium_limit() {
        // v = v_free and a huge gap: acceleration tends to zero.
        let p = fig2_params();
        let got = idm_accel(&p, pair_input(1e12, 1.0, 1.0, p.l), false).unwrap();
        assert!(got.abs() < 1e-12, "got {got}");
    }

    #[test]
    fn idm_accel_rejects_collapsed_gap() {
        let p = fig2_params();
        let err = idm_accel(&p, pair_input(0.0, 0.0, 0.0, p.l), false).unwrap_err();
        assert_eq!(err.gap, 0.0);
        assert!(idm_accel(&p, pair_input(-0.3, 0.0, 0.0, p.l), false).is_err());
    }

    #[test]
    fn free_flow_accel_examples() {
        let p = fig2_params();
        assert_eq!(free_flow_accel(&p, 0.0), p.a);
        assert!(free_flow_accel(&p, p.v_free).abs() < 1e-15);

        let table1 = ModelParams {
            a: 0.73,
            b: 1.67,
            v_free: 33.33,
            tau: 1.6,
            s0: 2.0,
            l: 5.0,
            delta: 4.0,
        };
        // at half the desired velocity: 0.73 (1 - 0.5^4) = 0.684375
        let got = free_flow_accel(&table1, table1.v_free / 2.0);
        assert!((got - 0.684375).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn h_saturation_examples() {
        assert_eq!(h_saturation(0.1, 0.0), 0.0);
        assert_eq!(h_saturation(0.1, 0.1), 1.0);
        assert_eq!(h_saturation(0.1, 0.05), 0.5);
        assert_eq!(h_saturation(0.1, -2.0), 0.0);
        assert_eq!(h_saturation(0.1, 7.0), 1.0);
    }

    #[test]
    fn h_tilde_saturation_examples() {
        assert_eq!(h_tilde_saturation(0.5, 2.0, 0.5), 0.25);
        assert_eq!(h_tilde_saturation(0.5, 2.0, 0.1), 0.25);
        assert_eq!(h_tilde_saturation(0.5, 2.0, 2.0), 1.0);
        assert_eq!(h_tilde_saturation(0.5, 2.0, 5.0), 1.0);
        // linear branch: 0.25 + 0.75 * (0.75 / 1.5) = 0.625
        let got = h_tilde_saturation(0.5, 2.0, 1.25);
        assert!((got - 0.625).abs() < 1e-15, "got {got}");
    }

    #[test]
    fn velocity_regularized_standstill_equals_max_accel() {
        let p = fig2_params();
        let cfg = VariantConfig::new(Variant::VelocityRegularized { eps_v: 0.1 });
        for gap in [0.05, 0.5, 1.0, 10.0] {
            let got = variant_accel(&p, &cfg, pair_input(gap, 0.0, 0.3, p.l), Mode::Moving).unwrap();
            assert_eq!(got, p.a, "gap {gap}");
        }
    }

    #[test]
    fn discontinuous_branches() {
        let p = fig2_params();
        let cfg = VariantConfig::new(Variant::Discontinuous);
        // stop branch: v = 0, gap = s0/2 < s0
        let got = variant_accel(&p, &cfg, pair_input(1.0, 0.0, 0.5, p.l), Mode::Moving).unwrap();
        assert_eq!(got, 0.0);
        // second branch: v = 0, gap >= s0 evaluates the classic law
        let got = variant_accel(&p, &cfg, pair_input(3.0, 0.0, 0.5, p.l), Mode::Moving).unwrap();
        let classic = idm_accel(&p, pair_input(3.0, 0.0, 0.5, p.l), false).unwrap();
        assert_eq!(got, classic);
        // latched stop mode wins regardless of the gap
        let got = variant_accel(&p, &cfg, pair_input(1.9, 0.0, 0.5, p.l), Mode::Stopped).unwrap();
        assert_eq!(got, 0.0);
    }

    #[test]
    fn acceleration_projected_clamps_and_extends() {
        let p = fig2_params();
        let cfg = VariantConfig::new(Variant::AccelerationProjected { a_min: 1.0 });
        // a gap far below s0 makes the raw IDM value very negative
        let raw = idm_accel(&p, pair_input(0.1, 0.0, 0.0, p.l), false).unwrap();
        assert!(raw < -50.0);
        let got = variant_accel(&p, &cfg, pair_input(0.1, 0.0, 0.0, p.l), Mode::Moving).unwrap();
        assert_eq!(got, -1.0);
        // collapsed gap: the clamp value continues the law
        let got = variant_accel(&p, &cfg, pair_input(-0.2, 3.0, 0.0, p.l), Mode::Moving).unwrap();
        assert_eq!(got, -1.0);
    }

    #[test]
    fn signed_power_term_agrees_at_zero_velocity() {
        let p = fig2_params();
        let unsigned = idm_accel(&p, pair_input(1.5, 0.0, 0.4, p.l), false).unwrap();
        let signed = idm_accel(&p, pair_input(1.5, 0.0, 0.4, p.l), true).unwrap();
        assert_eq!(unsigned, signed);
        // and counteracts negative velocities otherwise
        let unsigned = idm_accel(&p, pair_input(1.5, -0.5, 0.4, p.l), false).unwrap();
        let signed = idm_accel(&p, pair_input(1.5, -0.5, 0.4, p.l), true).unwrap();
        assert!(signed > unsigned);
    }
}
