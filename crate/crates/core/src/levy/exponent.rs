//! Characteristic exponent `φ(ξ) = ∫_V (1 - cos ξ·z) |z|^{-d-α} dz`.
//!
//! Polar reduction gives `φ(ξ) = c_α ∫_{V ∩ S^{d-1}} |ξ·u|^α σ(du)` with
//! `c_α = ∫_0^∞ (1 - cos s) s^{-1-α} ds`. In the plane the spherical
//! integral is a sum over arcs of an antiderivative of `|cos|^α`, which is
//! evaluated from a Chebyshev fit of its regular part.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::spectral::{planar_arcs, sample_in_union, union_surface_measure};
use crate::envelope::check_alpha;
use crate::error::Result;
use crate::geometry::{dot, norm, ConeUnion};
use crate::quad;

/// `c_α = ∫_0^∞ (1 - cos s) s^{-1-α} ds` with an error estimate.
///
/// `[0, π/2]` is integrated termwise from the cosine series. The remainder
/// is `(π/2)^{-α}/α - ∫_{π/2}^∞ cos(s) s^{-1-α} ds`, where the oscillatory
/// integral is summed over half-periods between zeros of `cos` and the
/// alternating partial sums are accelerated by repeated averaging.
pub fn stable_constant_with_error(alpha: f64) -> Result<quad::Estimate> {
    check_alpha(alpha)?;
    let a = FRAC_PI_2;
    let mut head = 0.0;
    let mut fact = 1.0;
    for k in 1..=30 {
        let two_k = 2.0 * k as f64;
        fact *= (two_k - 1.0) * two_k;
        let term = a.powf(two_k - alpha) / (fact * (two_k - alpha));
        head += if k % 2 == 1 { term } else { -term };
    }
    const PANELS: usize = 48;
    const AVERAGED: usize = 24;
    let mut partial = Vec::with_capacity(PANELS);
    let mut acc = 0.0;
    for k in 0..PANELS {
        let lo = a + k as f64 * PI;
        let est = quad::gauss_kronrod(&mut |s: f64| s.cos() * s.powf(-1.0 - alpha), lo, lo + PI);
        acc += est.value;
        partial.push(acc);
    }
    let mut level: Vec<f64> = partial[PANELS - AVERAGED..].to_vec();
    let mut spread = f64::INFINITY;
    while level.len() > 1 {
        if level.len() == 2 {
            spread = (level[1] - level[0]).abs();
        }
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    let oscillatory = level[0];
    Ok(quad::Estimate {
        value: head + a.powf(-alpha) / alpha - oscillatory,
        error: spread,
    })
}

pub fn stable_constant(alpha: f64) -> Result<f64> {
    stable_constant_with_error(alpha).map(|e| e.value)
}

const CHEB_NODES: usize = 40;

/// `A(s) = ∫_0^s |cos v|^α dv` for all real `s`.
///
/// On a quarter period `∫_0^w sin^α = w^{1+α} h(w)` with `h` analytic on
/// `[0, π/2]`; `h` is stored as a Chebyshev series.
#[derive(Debug, Clone)]
pub(crate) struct CosPowerIntegral {
    alpha: f64,
    coeffs: Vec<f64>,
    half_period: f64,
}

impl CosPowerIntegral {
    pub(crate) fn new(alpha: f64) -> Self {
        let n = CHEB_NODES;
        let half_w = 0.5 * FRAC_PI_2;
        let samples: Vec<f64> = (0..n)
            .map(|j| {
                let x = (PI * (j as f64 + 0.5) / n as f64).cos();
                let w = half_w * (x + 1.0);
                quad::tanh_sinh(
                    |tau: f64| {
                        let u = w * tau;
                        let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
                        (tau * sinc).powf(alpha)
                    },
                    0.0,
                    1.0,
                )
            })
            .collect();
        let coeffs = (0..n)
            .map(|k| {
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, f)| f * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                    .sum();
                let c = 2.0 * s / n as f64;
                if k == 0 {
                    0.5 * c
                } else {
                    c
                }
            })
            .collect();
        let mut me = Self {
            alpha,
            coeffs,
            half_period: 0.0,
        };
        me.half_period = me.sin_power(FRAC_PI_2);
        me
    }

    fn regular_part(&self, w: f64) -> f64 {
        let x = w / (0.5 * FRAC_PI_2) - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * x * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        x * b1 - b2 + self.coeffs[0]
    }

    /// `∫_0^w sin^α u du` for `w ∈ [0, π/2]`.
    pub(crate) fn sin_power(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        w.powf(1.0 + self.alpha) * self.regular_part(w)
    }

    pub(crate) fn eval(&self, s: f64) -> f64 {
        let n = ((s + FRAC_PI_2) / PI).floor();
        let r = s - n * PI;
        let centered = self.half_period - self.sin_power(FRAC_PI_2 - r.abs());
        2.0 * n * self.half_period + centered.copysign(r)
    }
}

#[derive(Debug, Clone)]
enum Route {
    /// Exact arc union with the closed-form angular antiderivative.
    Planar {
        arcs: Vec<(f64, f64)>,
        cos_power: CosPowerIntegral,
    },
    /// Fixed σ-distributed direction set for `d >= 3`.
    Sampled { directions: Vec<Vec<f64>>, weight: f64 },
}

/// Reusable evaluator of `φ` for one `(V, α)`.
#[derive(Debug, Clone)]
pub struct Symbol {
    alpha: f64,
    c_alpha: f64,
    dimension: usize,
    route: Route,
}

const SAMPLED_DIRECTIONS: usize = 1 << 14;
const SAMPLED_SEED: u64 = 0x0ddba115eed;

impl Symbol {
    pub fn new(v: &ConeUnion, alpha: f64) -> Result<Self> {
        let c_alpha = stable_constant(alpha)?;
        let route = if v.dimension() == 2 {
            Route::Planar {
                arcs: planar_arcs(v),
                cos_power: CosPowerIntegral::new(alpha),
            }
        } else {
            let m = union_surface_measure(v);
            let caps: f64 = m.cap_masses.iter().sum();
            let mut rng = ChaCha8Rng::seed_from_u64(SAMPLED_SEED);
            let directions = (0..SAMPLED_DIRECTIONS)
                .map(|_| sample_in_union(v, &m.cap_masses, caps, &mut rng))
                .collect();
            Route::Sampled {
                directions,
                weight: m.total_mass / SAMPLED_DIRECTIONS as f64,
            }
        };
        Ok(Self {
            alpha,
            c_alpha,
            dimension: v.dimension(),
            route,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// `φ(e_ω)` for the planar unit vector at angle `omega`.
    ///
    /// # Panics
    /// If the symbol was built for `d != 2`.
    pub fn direction_factor(&self, omega: f64) -> f64 {
        match &self.route {
            Route::Planar { arcs, cos_power } => {
                let raw: f64 = arcs
                    .iter()
                    .map(|&(a, b)| cos_power.eval(b - omega) - cos_power.eval(a - omega))
                    .sum();
                self.c_alpha * raw
            }
            Route::Sampled { .. } => panic!("direction_factor is defined for d = 2 only"),
        }
    }

    /// Angles in `[0, π)` where `ω ↦ φ(e_ω)` is not smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.route {
            Route::Planar { arcs, .. } => {
                let mut k: Vec<f64> = arcs
                    .iter()
                    .flat_map(|&(a, b)| [a, b])
                    .filter(|e| *e > 0.0 && *e < TAU)
                    .map(|e| (e + FRAC_PI_2).rem_euclid(PI))
                    .collect();
                k.sort_by(f64::total_cmp);
                k.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
                k
            }
            Route::Sampled { .. } => Vec::new(),
        }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        debug_assert_eq!(xi.len(), self.dimension);
        match &self.route {
            Route::Planar { .. } => {
                let r = norm(xi);
                if r == 0.0 {
                    return 0.0;
                }
                r.powf(self.alpha) * self.direction_factor(xi[1].atan2(xi[0]))
            }
            Route::Sampled { directions, weight } => {
                let s: f64 = directions.iter().map(|u| dot(xi, u).abs().powf(self.alpha)).sum();
                self.c_alpha * weight * s
            }
        }
    }

    /// Minimum of `φ` over unit directions and a minimizing direction, so
    /// that `φ(ξ) >= c |ξ|^α`.
    pub fn lower_bound(&self) -> (f64, Vec<f64>) {
        match &self.route {
            Route::Planar { .. } => {
                let n = 3600;
                let step = PI / n as f64;
                let (mut best_w, mut best) = (0.0, f64::INFINITY);
                for k in 0..n {
                    let w = k as f64 * step;
                    let f = self.direction_factor(w);
                    if f < best {
                        best = f;
                        best_w = w;
                    }
                }
                // Golden-section refinement inside the bracketing cells.
                let (mut lo, mut hi) = (best_w - step, best_w + step);
                let g = 0.5 * (5f64.sqrt() - 1.0);
                for _ in 0..60 {
                    let m1 = hi - g * (hi - lo);
                    let m2 = lo + g * (hi - lo);
                    if self.direction_factor(m1) < self.direction_factor(m2) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                let w = 0.5 * (lo + hi);
                let f = self.direction_factor(w).min(best);
                (f, vec![w.cos(), w.sin()])
            }
            Route::Sampled { .. } => {
                use rand::Rng;
                use rand_distr::StandardNormal;
                let mut rng = ChaCha8Rng::seed_from_u64(SAMPLED_SEED ^ 1);
                let mut best = (f64::INFINITY, vec![]);
                for _ in 0..1000 {
                    let g: Vec<f64> = (0..self.dimension).map(|_| rng.sample(StandardNormal)).collect();
                    let n = norm(&g);
                    let u: Vec<f64> = g.iter().map(|x| x / n).collect();
                    let f = self.eval(&u);
                    if f < best.0 {
                        best = (f, u);
                    }
                }
                best
            }
        }
    }
}

/// `φ(ξ)` for a single frequency. Builds a [`Symbol`]; reuse one for
/// repeated evaluation.
pub fn char_exponent(xi: &[f64], v: &ConeUnion, alpha: f64) -> Result<f64> {
    if xi.len() != v.dimension() {
        return Err(crate::error::domain("frequency dimension does not match V"));
    }
    Ok(Symbol::new(v, alpha)?.eval(xi))
}
