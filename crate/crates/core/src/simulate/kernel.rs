//! Jump-set descriptors and symmetric modulations `J = m · J^α`.

use serde::{Deserialize, Serialize};

use crate::envelope::check_alpha;
use crate::error::{domain, Error, Result};
use crate::geometry::{norm, ConeUnion};
use crate::levy::{planar_arcs, union_surface_measure};
use crate::quad;

/// Directional filter of a [`JumpSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "cones")]
pub enum Directions {
    Any,
    /// Increments whose direction lies in this union.
    Within(ConeUnion),
}

/// `A = {z : r_min < |z| < r_max, z/|z| ∈ directions}`, symmetric under
/// `z ↦ -z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpSet {
    pub r_min: f64,
    /// `f64::INFINITY` for an unbounded set.
    pub r_max: f64,
    pub directions: Directions,
}

impl JumpSet {
    pub fn beyond(r_min: f64) -> Self {
        Self {
            r_min,
            r_max: f64::INFINITY,
            directions: Directions::Any,
        }
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        let r = norm(z);
        if !(r > self.r_min && r < self.r_max) {
            return false;
        }
        match &self.directions {
            Directions::Any => true,
            Directions::Within(w) => w.contains_raw(z),
        }
    }

    fn validate(&self, v: &ConeUnion) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_max > self.r_min) {
            return Err(domain(format!(
                "jump set needs 0 < r_min < r_max, got ({}, {})",
                self.r_min, self.r_max
            )));
        }
        if let Directions::Within(w) = &self.directions {
            if w.dimension() != v.dimension() {
                return Err(domain("jump set and support live in different dimensions"));
            }
        }
        Ok(())
    }

    /// Planar angular arcs of `A`'s directions intersected with `V`.
    fn arcs(&self, v: &ConeUnion) -> Vec<(f64, f64)> {
        let own = planar_arcs(v);
        match &self.directions {
            Directions::Any => own,
            Directions::Within(w) => intersect_arcs(&own, &planar_arcs(w)),
        }
    }

    /// `ν(A) = σ(A-directions ∩ V) (r_min^{-α} - r_max^{-α}) / α`.
    pub fn levy_measure(&self, v: &ConeUnion, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        self.validate(v)?;
        let sigma = match (&self.directions, v.dimension()) {
            (Directions::Any, _) => union_surface_measure(v).total_mass,
            (Directions::Within(_), 2) => self.arcs(v).iter().map(|(a, b)| b - a).sum(),
            (Directions::Within(_), d) => {
                return Err(Error::UnsupportedDimension {
                    what: "directional jump sets",
                    got: d,
                    need: 2,
                })
            }
        };
        Ok(sigma * (self.r_min.powf(-alpha) - self.r_max.powf(-alpha)) / alpha)
    }

    /// `∫_A g(z) ν(dz)` in the plane, by nested adaptive quadrature over the
    /// angle and `s = r^{-α}` (so `r^{-1-α} dr = ds / α`).
    pub fn polar_integral<G: Fn(&[f64]) -> f64>(&self, v: &ConeUnion, alpha: f64, g: G, rel_tol: f64) -> Result<f64> {
        check_alpha(alpha)?;
        self.validate(v)?;
        if v.dimension() != 2 {
            return Err(Error::UnsupportedDimension {
                what: "polar jump-set quadrature",
                got: v.dimension(),
                need: 2,
            });
        }
        let s_lo = self.r_max.powf(-alpha);
        let s_hi = self.r_min.powf(-alpha);
        let scale = (s_hi - s_lo) / alpha;
        let mut total = 0.0;
        for (a, b) in self.arcs(v) {
            let outer = |omega: f64| {
                let (su, cu) = omega.sin_cos();
                let inner = |s: f64| {
                    let r = s.powf(-1.0 / alpha);
                    g(&[r * cu, r * su])
                };
                quad::adaptive(inner, &[s_lo, s_hi], 1e-3 * rel_tol * scale, 1e-3 * rel_tol, 400).value / alpha
            };
            total += quad::adaptive(outer, &[a, b], 0.0, 0.1 * rel_tol, 400).value;
        }
        Ok(total)
    }
}

fn intersect_arcs(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a0, a1) in a {
        for &(b0, b1) in b {
            let (lo, hi) = (a0.max(b0), a1.min(b1));
            if hi > lo {
                out.push((lo, hi));
            }
        }
    }
    out
}

/// A jump intensity `x ↦ ∫_A m(x, x+z) ν(dz)`.
pub type Intensity<'a> = Box<dyn Fn(&[f64]) -> f64 + Send + Sync + 'a>;

/// Symmetric modulation `m` with `1/κ <= m <= κ`, so that `m · J^α` is a
/// `κ`-comparable kernel.
pub trait ModulatedKernel: Send + Sync {
    fn kappa(&self) -> f64;

    fn modulation(&self, x: &[f64], y: &[f64]) -> f64;

    /// Generic route: planar polar quadrature at every state.
    fn intensity<'a>(&'a self, set: &'a JumpSet, v: &'a ConeUnion, alpha: f64) -> Result<Intensity<'a>> {
        set.validate(v)?;
        Ok(Box::new(move |x: &[f64]| {
            let shifted = |z: &[f64]| {
                let y: Vec<f64> = x.iter().zip(z).map(|(a, b)| a + b).collect();
                self.modulation(x, &y)
            };
            set.polar_integral(v, alpha, shifted, 1e-6)
                .expect("jump set validated above")
        }))
    }
}

/// `m ≡ value`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantModulation {
    pub value: f64,
    pub kappa: f64,
}

impl ConstantModulation {
    pub fn new(value: f64, kappa: f64) -> Result<Self> {
        if !(kappa >= 1.0 && value >= 1.0 / kappa && value <= kappa) {
            return Err(domain(format!("need 1/κ <= m <= κ, got m = {value}, κ = {kappa}")));
        }
        Ok(Self { value, kappa })
    }
}

impl ModulatedKernel for ConstantModulation {
    fn kappa(&self) -> f64 {
        self.kappa
    }

    fn modulation(&self, _: &[f64], _: &[f64]) -> f64 {
        self.value
    }

    fn intensity<'a>(&'a self, set: &'a JumpSet, v: &'a ConeUnion, alpha: f64) -> Result<Intensity<'a>> {
        let total = self.value * set.levy_measure(v, alpha)?;
        Ok(Box::new(move |_| total))
    }
}

/// `m(x, y) = 1 + a sin(x₁ + y₁)` with `0 <= a < 1`; `κ = 1 / (1 - a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineModulation {
    pub amplitude: f64,
}

impl SineModulation {
    pub fn new(amplitude: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&amplitude) {
            return Err(domain(format!("amplitude must lie in [0, 1), got {amplitude}")));
        }
        Ok(Self { amplitude })
    }
}

impl ModulatedKernel for SineModulation {
    fn kappa(&self) -> f64 {
        1.0 / (1.0 - self.amplitude)
    }

    fn modulation(&self, x: &[f64], y: &[f64]) -> f64 {
        1.0 + self.amplitude * (x[0] + y[0]).sin()
    }

    /// With `y = x + z`, `sin(2x₁ + z₁)` splits into `sin 2x₁ · cos z₁ +
    /// cos 2x₁ · sin z₁`, so two state-free integrals over `A` suffice.
    fn intensity<'a>(&'a self, set: &'a JumpSet, v: &'a ConeUnion, alpha: f64) -> Result<Intensity<'a>> {
        let mass = set.levy_measure(v, alpha)?;
        let cos_part = set.polar_integral(v, alpha, |z| z[0].cos(), 1e-8)?;
        let sin_part = set.polar_integral(v, alpha, |z| z[0].sin(), 1e-8)?;
        let a = self.amplitude;
        Ok(Box::new(move |x: &[f64]| {
            let (s, c) = (2.0 * x[0]).sin_cos();
            mass + a * (s * cos_part + c * sin_part)
        }))
    }
}
