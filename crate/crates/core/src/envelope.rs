//! Closed-form two-sided envelopes for the heat kernel and Green function.
//!
//! All envelopes use the multiplicative constant 1; callers that compare
//! against densities fit the sandwich constant themselves.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{dist_to_union, meeting_points, norm, sub, ConeUnion, SymmetricCone};

/// Stability index, dimension and comparability constant of the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub dimension: usize,
    pub kappa: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, dimension: usize, kappa: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if dimension < 2 {
            return Err(domain(format!("dimension must be >= 2, got {dimension}")));
        }
        if !(kappa >= 1.0 && kappa.is_finite()) {
            return Err(domain(format!("kappa must be a finite value >= 1, got {kappa}")));
        }
        Ok(Self {
            alpha,
            dimension,
            kappa,
        })
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(domain(format!("alpha must lie in (0, 2), got {alpha}")))
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("time must be positive and finite, got {t}")))
    }
}

/// Envelope value, in units of `t^{-d/α}`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct EnvelopeValue(pub f64);

impl EnvelopeValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_dims(d: usize, params: &ModelParams, x: &[f64], y: &[f64]) -> Result<()> {
    if params.dimension != d || x.len() != d || y.len() != d {
        return Err(domain(format!(
            "dimension mismatch: model d = {}, cones d = {d}, points {} and {}",
            params.dimension,
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

// 1 ∧ t / s^α, with s = 0 giving 1.
fn cap_ratio(t: f64, s: f64, alpha: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else {
        (t / s.powf(alpha)).min(1.0)
    }
}

/// `t^{-d/α} (1 ∧ t/|x-y|^α)^{1+d/α} (1 ∧ t/dist(y-x, V)^α)`.
pub fn hk_envelope(t: f64, x: &[f64], y: &[f64], v: &ConeUnion, params: &ModelParams) -> Result<EnvelopeValue> {
    check_time(t)?;
    check_dims(v.dimension(), params, x, y)?;
    let d = params.dimension as f64;
    let a = params.alpha;
    let w = sub(y, x);
    let near = t.powf(-d / a);
    let jump = cap_ratio(t, norm(&w), a).powf(1.0 + d / a);
    let reach = cap_ratio(t, dist_to_union(v, &w), a);
    Ok(EnvelopeValue(near * jump * reach))
}

/// Product form through a meeting point `z ∈ S(Γ, x, y)`: the longer leg
/// carries the exponent `1 + d/α`, the shorter leg exponent 1.
pub fn hk_envelope_product(
    t: f64,
    x: &[f64],
    y: &[f64],
    cone: &SymmetricCone,
    params: &ModelParams,
) -> Result<EnvelopeValue> {
    check_time(t)?;
    check_dims(cone.dim(), params, x, y)?;
    let d = params.dimension as f64;
    let a = params.alpha;
    let near = t.powf(-d / a);
    if x == y {
        return Ok(EnvelopeValue(near));
    }
    let s = meeting_points(cone, x, y)?;
    let (long, short) = s.legs(x, y);
    let value = near * cap_ratio(t, long, a).powf(1.0 + d / a) * cap_ratio(t, short, a);
    Ok(EnvelopeValue(value))
}

/// `|x - y|^{α - d}`.
pub fn green_envelope(x: &[f64], y: &[f64], params: &ModelParams) -> Result<f64> {
    if x.len() != params.dimension || y.len() != params.dimension {
        return Err(domain("point dimension does not match the model"));
    }
    let r = norm(&sub(y, x));
    if r == 0.0 {
        return Err(domain("the Green function is singular at x = y"));
    }
    Ok(r.powf(params.alpha - params.dimension as f64))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use super::*;
    use crate::geometry::UnitVector;

    fn setup(alpha: f64) -> (ConeUnion, ModelParams) {
        let c = SymmetricCone::new(UnitVector::from_angle(0.0), FRAC_PI_4).unwrap();
        (ConeUnion::single(c), ModelParams::new(alpha, 2, 1.0).unwrap())
    }

    #[test]
    fn diagonal_value() {
        let (v, p) = setup(1.5);
        let e = hk_envelope(0.7, &[1.0, 2.0], &[1.0, 2.0], &v, &p).unwrap();
        assert!((e.value() - 0.7f64.powf(-2.0 / 1.5)).abs() < 1e-14);
        assert!(hk_envelope(0.0, &[0.0, 0.0], &[1.0, 0.0], &v, &p).is_err());
    }

    #[test]
    fn in_cone_reduces_to_isotropic_form() {
        let (v, p) = setup(1.0);
        let t: f64 = 0.5;
        let y = [4.0, 1.0];
        let r = norm(&y);
        let iso = t.powf(-2.0) * (t / r).powi(3);
        let e = hk_envelope(t, &[0.0, 0.0], &y, &v, &p).unwrap();
        assert!((e.value() - iso).abs() < 1e-15 * iso.max(1.0));
        // Off-cone but within t^{1/α} of V: third factor is 1 as well.
        let y = [0.0, 0.6];
        let e = hk_envelope(1.0, &[0.0, 0.0], &y, &v, &p).unwrap();
        assert!((e.value() - (1.0f64 / 0.6).min(1.0).powi(3)).abs() < 1e-15);
    }

    #[test]
    fn product_form_direct_jump_is_isotropic() {
        let (v, p) = setup(1.2);
        let cone = &v.cones()[0];
        let (x, y) = ([0.0, 0.0], [3.0, -1.0]);
        let a = hk_envelope(0.3, &x, &y, &v, &p).unwrap();
        let b = hk_envelope_product(0.3, &x, &y, cone, &p).unwrap();
        assert!((a.value() - b.value()).abs() <= 1e-15 * a.value());
    }

    #[test]
    fn green_examples() {
        let p = ModelParams::new(1.0, 2, 1.0).unwrap();
        assert_eq!(green_envelope(&[0.0, 0.0], &[1.0, 0.0], &p).unwrap(), 1.0);
        assert_eq!(green_envelope(&[0.0, 0.0], &[0.0, 2.0], &p).unwrap(), 0.5);
        assert!(green_envelope(&[1.0, 1.0], &[1.0, 1.0], &p).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(2.0, 2, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1, 1.0).is_err());
        assert!(ModelParams::new(1.0, 2, 0.5).is_err());
    }
}
