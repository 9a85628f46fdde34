//! Pointwise Fourier inversion of `e^{-tφ}` in the plane.
//!
//! In polar frequency coordinates `ξ = ρ e_ω`,
//!
//! ```text
//! q(t, x) = (2π)^{-2} ∫_0^{2π} a(ω)^{-2/α} g(|x·e_ω| a(ω)^{-1/α}) dω,   a(ω) = t φ(e_ω),
//! g(u)    = ∫_0^∞ e^{-ρ^α} cos(uρ) ρ dρ.
//! ```
//!
//! `g` is evaluated on a ray rotated into the upper half plane, where the
//! integrand decays exponentially without oscillating, so no frequency
//! truncation or lattice periodization is involved. The angular integral is
//! split at the kinks of `ω ↦ φ(e_ω)` and at the direction orthogonal to
//! `x`, then integrated adaptively.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use super::exponent::Symbol;
use crate::envelope::{check_alpha, check_time};
use crate::error::{domain, Error, Result};
use crate::geometry::{norm, sub, ConeUnion};
use crate::quad;

const MAX_PANELS: usize = 6000;

/// Density value with its estimated absolute quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityValue {
    pub value: f64,
    pub error: f64,
}

/// `g_α(u) = ∫_0^∞ e^{-ρ^α} cos(uρ) ρ dρ` for `u >= 0`.
pub(crate) fn radial_profile(alpha: f64, u: f64) -> f64 {
    // Rotation angle β with αβ <= π/4 keeps Re(ρ^α) > 0 on the ray.
    let beta = if alpha < 0.75 { PI / 3.0 } else { PI / (4.0 * alpha) };
    let ray = Complex64::from_polar(1.0, beta);
    let ray_a = Complex64::from_polar(1.0, alpha * beta);
    let jac = Complex64::from_polar(1.0, 2.0 * beta);
    let iu = Complex64::new(0.0, u) * ray;
    let scale = 1.0 / (1.0 + u);
    let sum = quad::exp_sinh_complex(
        |r| {
            let z = -ray_a * r.powf(alpha) + iu * r;
            z.exp() * r
        },
        scale,
    );
    (sum * jac).re
}

/// Planar density oracle for one `(V, α)`.
#[derive(Debug, Clone)]
pub struct DensityOracle {
    symbol: Symbol,
    g0: f64,
}

impl DensityOracle {
    pub fn new(v: &ConeUnion, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if v.dimension() != 2 {
            return Err(Error::UnsupportedDimension {
                what: "the Fourier density oracle",
                got: v.dimension(),
                need: 2,
            });
        }
        let symbol = Symbol::new(v, alpha)?;
        Ok(Self {
            symbol,
            g0: radial_profile(alpha, 0.0),
        })
    }

    pub fn symbol(&self) -> &Symbol {
        &self.symbol
    }

    pub fn alpha(&self) -> f64 {
        self.symbol.alpha()
    }

    /// `q(t, x)` with relative tolerance `tol`.
    pub fn density(&self, t: f64, x: &[f64], tol: f64) -> Result<DensityValue> {
        check_time(t)?;
        if x.len() != 2 {
            return Err(domain("density point must be two-dimensional"));
        }
        let alpha = self.alpha();
        let r = norm(x);
        let mut breaks = vec![0.0, PI];
        breaks.extend(self.symbol.kinks());
        let wx = x[1].atan2(x[0]);
        if r > 0.0 {
            breaks.push((wx + FRAC_PI_2).rem_euclid(PI));
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let inv = -1.0 / alpha;
        let integrand = |w: f64| {
            let a = t * self.symbol.direction_factor(w);
            let s = a.powf(inv);
            if r == 0.0 {
                s * s * self.g0
            } else {
                let u = r * (w - wx).cos().abs() * s;
                s * s * radial_profile(alpha, u)
            }
        };
        let norm_factor = 2.0 / (4.0 * PI * PI);
        let floor = 1e-15 * t.powf(-2.0 / alpha);
        let est = quad::adaptive(integrand, &breaks, floor, tol, MAX_PANELS);
        Ok(DensityValue {
            value: norm_factor * est.value,
            error: norm_factor * est.error,
        })
    }

    /// `G(x, y) = ∫_0^∞ q(t, y - x) dt`.
    ///
    /// Split at `t0 = |y-x|^α`. Below it, `q` is integrated directly in `t`.
    /// Above it, self-similarity `q(t, w) = t^{-2/α} q(1, t^{-1/α} w)` and
    /// `s = t^{-1/α}`, `v = s^{2-α}` turn the tail into
    /// `α/(2-α) ∫_0^{|w|^{α-2}} q(1, v^{1/(2-α)} w) dv`.
    pub fn green(&self, x: &[f64], y: &[f64], tol: f64) -> Result<DensityValue> {
        if x.len() != 2 || y.len() != 2 {
            return Err(domain("Green function points must be two-dimensional"));
        }
        let w = sub(y, x);
        let r = norm(&w);
        if r == 0.0 {
            return Err(domain("the Green function is singular at x = y"));
        }
        let alpha = self.alpha();
        let inner = 0.05 * tol;
        let mut failure: Option<Error> = None;
        let mut eval = |t: f64, p: &[f64]| match self.density(t, p, inner) {
            Ok(q) => q.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let t0 = r.powf(alpha);
        let scale = r.powf(alpha - 2.0);
        let head = quad::adaptive(|t| eval(t, &w), &[0.0, t0], 1e-12 * scale, tol, 400);
        let p = 1.0 / (2.0 - alpha);
        let v_max = r.powf(alpha - 2.0);
        let tail = quad::adaptive(
            |v: f64| {
                let s = v.powf(p);
                eval(1.0, &[s * w[0], s * w[1]])
            },
            &[0.0, v_max],
            1e-12 * scale,
            tol,
            400,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let k = alpha * p;
        Ok(DensityValue {
            value: head.value + k * tail.value,
            error: head.error + k * tail.error,
        })
    }
}

/// `q(t, x) = (2π)^{-2} ∫ e^{-tφ(ξ)} cos(x·ξ) dξ` for `d = 2`.
pub fn fourier_density(t: f64, x: &[f64], v: &ConeUnion, alpha: f64, tol: f64) -> Result<DensityValue> {
    DensityOracle::new(v, alpha)?.density(t, x, tol)
}

/// Green function from the density oracle, `d = 2`.
pub fn green_from_oracle(x: &[f64], y: &[f64], v: &ConeUnion, alpha: f64, tol: f64) -> Result<DensityValue> {
    DensityOracle::new(v, alpha)?.green(x, y, tol)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use statrs::function::gamma::gamma;

    use super::*;
    use crate::geometry::{SymmetricCone, UnitVector};

    fn isotropic() -> ConeUnion {
        ConeUnion::new(
            2,
            vec![
                SymmetricCone::new(UnitVector::from_angle(0.0), FRAC_PI_2).unwrap(),
                SymmetricCone::new(UnitVector::from_angle(FRAC_PI_2), FRAC_PI_2).unwrap(),
            ],
        )
        .unwrap()
    }

    fn quarter_cone() -> ConeUnion {
        ConeUnion::single(SymmetricCone::new(UnitVector::from_angle(0.0), FRAC_PI_4).unwrap())
    }

    #[test]
    fn radial_profile_closed_forms() {
        // α = 1: g(u) = (1 - u²)/(1 + u²)²; u = 0: Γ(2/α)/α.
        for u in [0.0f64, 0.3, 1.0, 2.5, 10.0, 150.0, 1e4] {
            let exact = (1.0 - u * u) / (1.0 + u * u).powi(2);
            let got = radial_profile(1.0, u);
            assert!(
                (got - exact).abs() < 1e-13 * (1.0 + exact.abs()),
                "u {u}: {got} vs {exact}"
            );
            if u > 1.0 {
                assert!((got / exact - 1.0).abs() < 1e-9, "u {u}");
            }
        }
        for alpha in [0.4, 0.8, 1.5, 1.9] {
            let exact = gamma(2.0 / alpha) / alpha;
            assert!((radial_profile(alpha, 0.0) / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn radial_profile_matches_real_axis_quadrature() {
        for alpha in [0.5, 1.5] {
            for u in [0.2, 1.7, 4.0] {
                // Oracle: real-axis integration after ρ = s^{1/α}, which
                // removes the endpoint singularity of e^{-ρ^α}.
                let f = |s: f64| {
                    let rho = s.powf(1.0 / alpha);
                    (-s).exp() * (u * rho).cos() * rho * rho / (alpha * s)
                };
                let est = quad::adaptive(f, &[0.0, 1.0, 5.0, 20.0, 60.0], 1e-14, 1e-13, 4000);
                let got = radial_profile(alpha, u);
                assert!(
                    (got - est.value).abs() < 1e-10,
                    "alpha {alpha} u {u}: {got} vs {}",
                    est.value
                );
            }
        }
    }

    #[test]
    fn isotropic_cauchy_density() {
        // φ(ξ) = 2π|ξ| for α = 1 on the full circle: 2D Cauchy with scale 2πt.
        let oracle = DensityOracle::new(&isotropic(), 1.0).unwrap();
        for (t, x) in [
            (1.0, [0.0, 0.0]),
            (0.5, [1.0, 2.0]),
            (2.0, [-30.0, 4.0]),
            (1.0, [40.0, 0.0]),
        ] {
            let s = 2.0 * PI * t;
            let r2 = x[0] * x[0] + x[1] * x[1];
            let exact = s / (2.0 * PI * (r2 + s * s).powf(1.5));
            let got = oracle.density(t, &x, 1e-10).unwrap();
            assert!(
                (got.value / exact - 1.0).abs() < 1e-8,
                "t {t} x {x:?}: {} vs {exact}",
                got.value
            );
        }
    }

    #[test]
    fn symmetry_and_self_similarity() {
        let oracle = DensityOracle::new(&quarter_cone(), 1.3).unwrap();
        let x = [0.7, -2.1];
        let a = oracle.density(0.8, &x, 1e-10).unwrap().value;
        let b = oracle.density(0.8, &[-0.7, 2.1], 1e-10).unwrap().value;
        assert!((a / b - 1.0).abs() < 1e-9);
        let t: f64 = 3.0;
        let s = t.powf(-1.0 / 1.3);
        let c = t.powf(-2.0 / 1.3) * oracle.density(1.0, &[s * x[0], s * x[1]], 1e-10).unwrap().value;
        let d = oracle.density(t, &x, 1e-10).unwrap().value;
        assert!((c / d - 1.0).abs() < 1e-8);
    }

    #[test]
    fn on_diagonal_bound() {
        // q(t,0) <= (2π)^{-2} ∫ e^{-c t |ξ|^α} dξ with c the directional minimum.
        let oracle = DensityOracle::new(&quarter_cone(), 1.0).unwrap();
        let (c, _) = oracle.symbol().lower_bound();
        let bound = gamma(2.0) * 2.0 * PI / (c * c) / (4.0 * PI * PI);
        let q = oracle.density(1.0, &[0.0, 0.0], 1e-10).unwrap().value;
        assert!(q > 0.0 && q <= bound);
    }

    #[test]
    fn rejects_non_planar_and_bad_time() {
        let c3 = SymmetricCone::new(UnitVector::basis(3, 0).unwrap(), 0.5).unwrap();
        let err = DensityOracle::new(&ConeUnion::single(c3), 1.0).unwrap_err();
        assert!(matches!(err, Error::UnsupportedDimension { .. }));
        assert!(fourier_density(0.0, &[0.0, 0.0], &quarter_cone(), 1.0, 1e-6).is_err());
    }

    #[test]
    fn green_isotropic_closed_form() {
        // Isotropic α = 1 with φ = 2π|ξ|: G(x) = (2π)^{-2} ∫ e^{-ix·ξ}/(2π|ξ|) dξ
        // = 1 / (4π² |x|).
        let oracle = DensityOracle::new(&isotropic(), 1.0).unwrap();
        let g = oracle.green(&[0.0, 0.0], &[1.5, -2.0], 1e-6).unwrap();
        let exact = 1.0 / (4.0 * PI * PI * 2.5);
        assert!((g.value / exact - 1.0).abs() < 1e-5, "{} vs {exact}", g.value);
        assert!(oracle.green(&[1.0, 1.0], &[1.0, 1.0], 1e-6).is_err());
    }
}
