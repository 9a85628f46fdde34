//! Surface measure of `V ∩ S^{d-1}` and the direction law it induces.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::envelope::check_alpha;
use crate::error::{domain, Result};
use crate::geometry::{dot, norm, ConeUnion, SymmetricCone};
use crate::quad;

/// Surface measure `|S^n|` of the unit `n`-sphere in `R^{n+1}`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 2.0,
        1 => TAU,
        _ => TAU / (n as f64 - 1.0) * sphere_area(n - 2),
    }
}

/// `∫_0^θ sin^m ψ dψ` by the standard reduction formula.
pub(crate) fn sin_power_integral(m: usize, theta: f64) -> f64 {
    match m {
        0 => theta,
        1 => 1.0 - theta.cos(),
        _ => {
            let mf = m as f64;
            -theta.sin().powi(m as i32 - 1) * theta.cos() / mf + (mf - 1.0) / mf * sin_power_integral(m - 2, theta)
        }
    }
}

/// Surface measure of `Γ(λ, θ) ∩ S^{d-1}`, both nappes.
pub fn cap_surface_measure(aperture: f64, d: usize) -> Result<f64> {
    if !(aperture > 0.0 && aperture <= std::f64::consts::FRAC_PI_2) {
        return Err(domain(format!("aperture must lie in (0, pi/2], got {aperture}")));
    }
    if d < 2 {
        return Err(domain(format!("dimension must be >= 2, got {d}")));
    }
    Ok(2.0 * sphere_area(d - 2) * sin_power_integral(d - 2, aperture))
}

/// How `total_mass` was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassMethod {
    /// Exact arc union on the circle.
    ArcUnion,
    /// Inclusion–exclusion with one-dimensional quadrature for overlaps.
    InclusionExclusion,
    /// Importance-sampled Monte Carlo over the cap mixture.
    MonteCarlo,
}

/// Measure with standard error; the error is zero for deterministic routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// `σ` restricted to `V ∩ S^{d-1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMeasure {
    pub total_mass: f64,
    pub cap_masses: Vec<f64>,
    /// Measure covered by two or more cones, counted once per extra cover.
    pub overlap_estimate: MassEstimate,
    pub total_std_error: f64,
    pub method: MassMethod,
}

/// Disjoint sorted arcs `[a, b)` in `[0, 2π)` covered by a planar union.
pub(crate) fn planar_arcs(v: &ConeUnion) -> Vec<(f64, f64)> {
    let mut raw = Vec::new();
    for c in v.cones() {
        let ax = c.axis().as_slice();
        let center = ax[1].atan2(ax[0]);
        for shift in [0.0, PI] {
            let lo = (center + shift - c.aperture()).rem_euclid(TAU);
            let hi = lo + 2.0 * c.aperture();
            if hi > TAU {
                raw.push((lo, TAU));
                raw.push((0.0, hi - TAU));
            } else {
                raw.push((lo, hi));
            }
        }
    }
    raw.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in raw {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

/// Fraction of `S^{m}` (`m >= 1`) lying in the open cap `{u : u·e > c}`.
fn sphere_cap_fraction(m: usize, c: f64) -> f64 {
    if c >= 1.0 {
        return 0.0;
    }
    if c <= -1.0 {
        return 1.0;
    }
    sin_power_integral(m - 1, c.acos()) / sin_power_integral(m - 1, PI)
}

/// Measure of the intersection of one-sided caps `C(λ, θ1) ∩ C(μ, θ2)` in
/// `d >= 3`, where `gamma` is the angle between `λ` and `μ`.
fn one_sided_cap_overlap(d: usize, theta1: f64, theta2: f64, gamma: f64) -> f64 {
    let (cg, sg) = (gamma.cos(), gamma.sin());
    let ct2 = theta2.cos();
    let slice = |psi: f64| -> f64 {
        let (cp, sp) = (psi.cos(), psi.sin());
        let frac = if sg * sp <= 1e-300 {
            if cp * cg > ct2 {
                1.0
            } else {
                0.0
            }
        } else {
            sphere_cap_fraction(d - 2, (ct2 - cp * cg) / (sp * sg))
        };
        sp.powi(d as i32 - 2) * frac
    };
    let mut breaks = vec![0.0, theta1];
    for b in [(gamma - theta2).abs(), gamma + theta2] {
        if b > 0.0 && b < theta1 {
            breaks.push(b);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let est = quad::adaptive(slice, &breaks, 1e-13, 1e-12, 4000);
    sphere_area(d - 2) * est.value
}

fn symmetric_overlap(d: usize, a: &SymmetricCone, b: &SymmetricCone) -> f64 {
    let c = dot(a.axis().as_slice(), b.axis().as_slice()).clamp(-1.0, 1.0);
    let gamma = c.acos();
    2.0 * (one_sided_cap_overlap(d, a.aperture(), b.aperture(), gamma)
        + one_sided_cap_overlap(d, a.aperture(), b.aperture(), PI - gamma))
}

/// Draws a direction from the normalized surface measure of one cone.
pub(crate) fn sample_in_cone<R: Rng + ?Sized>(cone: &SymmetricCone, rng: &mut R) -> Vec<f64> {
    let d = cone.dim();
    let theta = cone.aperture();
    let axis = cone.axis().as_slice();
    let nappe = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let psi = match d {
        2 => theta * rng.random::<f64>(),
        3 => {
            let c = 1.0 - rng.random::<f64>() * (1.0 - theta.cos());
            c.clamp(-1.0, 1.0).acos()
        }
        _ => loop {
            let psi = theta * rng.random::<f64>();
            let accept = (psi.sin() / theta.sin()).powi(d as i32 - 2);
            if rng.random::<f64>() < accept {
                break psi;
            }
        },
    };
    // Uniform direction orthogonal to the axis.
    let perp: Vec<f64> = if d == 2 {
        let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
        vec![-s * axis[1], s * axis[0]]
    } else {
        loop {
            let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let along = dot(&g, axis);
            let p: Vec<f64> = g.iter().zip(axis).map(|(gi, ai)| gi - along * ai).collect();
            let n = norm(&p);
            if n > 1e-12 {
                break p.into_iter().map(|pi| pi / n).collect();
            }
        }
    };
    let (c, s) = (psi.cos(), psi.sin());
    axis.iter().zip(&perp).map(|(a, p)| nappe * (c * a + s * p)).collect()
}

/// Draws a direction from the normalized surface measure on `V ∩ S^{d-1}`:
/// a cap chosen proportionally to its mass, then thinned by the number of
/// cones covering the point.
pub(crate) fn sample_in_union<R: Rng + ?Sized>(
    v: &ConeUnion,
    cap_masses: &[f64],
    cap_total: f64,
    rng: &mut R,
) -> Vec<f64> {
    let cones = v.cones();
    loop {
        let i = if cones.len() == 1 {
            0
        } else {
            let mut u = rng.random::<f64>() * cap_total;
            let mut pick = cones.len() - 1;
            for (k, m) in cap_masses.iter().enumerate() {
                if u < *m {
                    pick = k;
                    break;
                }
                u -= m;
            }
            pick
        };
        let dir = sample_in_cone(&cones[i], rng);
        let mult = v.multiplicity(&dir);
        if mult == 0 {
            // Landed on a boundary through rounding; redraw.
            continue;
        }
        if mult == 1 || rng.random::<f64>() * (mult as f64) < 1.0 {
            return dir;
        }
    }
}

const MC_SEED: u64 = 0x5eedc0de0f5a11;
const MC_TARGET_REL_SE: f64 = 0.002;

/// Total measure by importance sampling from the cap mixture:
/// `σ(V) = Σ caps · E[1 / multiplicity]`.
fn monte_carlo_mass(v: &ConeUnion, cap_masses: &[f64]) -> MassEstimate {
    let cap_total: f64 = cap_masses.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
    let cones = v.cones();
    let (mut n, mut s1, mut s2) = (0usize, 0.0, 0.0);
    loop {
        for _ in 0..65_536 {
            let mut u = rng.random::<f64>() * cap_total;
            let mut pick = cones.len() - 1;
            for (k, m) in cap_masses.iter().enumerate() {
                if u < *m {
                    pick = k;
                    break;
                }
                u -= m;
            }
            let dir = sample_in_cone(&cones[pick], &mut rng);
            let w = 1.0 / v.multiplicity(&dir).max(1) as f64;
            s1 += w;
            s2 += w * w;
            n += 1;
        }
        let mean = s1 / n as f64;
        let var = (s2 / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        if se <= MC_TARGET_REL_SE * mean * 0.5 || n >= 1 << 24 {
            return MassEstimate {
                value: cap_total * mean,
                std_error: cap_total * se,
            };
        }
    }
}

/// Surface measure of `V ∩ S^{d-1}` with per-cone cap masses.
pub fn union_surface_measure(v: &ConeUnion) -> SpectralMeasure {
    let d = v.dimension();
    let cap_masses: Vec<f64> = v
        .cones()
        .iter()
        .map(|c| cap_surface_measure(c.aperture(), d).expect("cone aperture validated"))
        .collect();
    let cap_sum: f64 = cap_masses.iter().sum();
    let (total, se, method) = if d == 2 {
        let total = planar_arcs(v).iter().map(|(a, b)| b - a).sum();
        (total, 0.0, MassMethod::ArcUnion)
    } else if v.cones().len() == 1 {
        (cap_sum, 0.0, MassMethod::InclusionExclusion)
    } else if v.cones().len() == 2 {
        let overlap = symmetric_overlap(d, &v.cones()[0], &v.cones()[1]);
        (cap_sum - overlap, 0.0, MassMethod::InclusionExclusion)
    } else {
        let est = monte_carlo_mass(v, &cap_masses);
        (est.value, est.std_error, MassMethod::MonteCarlo)
    };
    let full = sphere_area(d - 1);
    let total = total.min(cap_sum).min(full);
    SpectralMeasure {
        total_mass: total,
        cap_masses,
        overlap_estimate: MassEstimate {
            value: (cap_sum - total).max(0.0),
            std_error: se,
        },
        total_std_error: se,
        method,
    }
}

/// `ν({|z| > δ} ∩ V) = σ(V ∩ S^{d-1}) δ^{-α} / α`: the jump rate of the
/// compound-Poisson part that keeps jumps longer than `δ`.
pub fn tail_mass(v: &ConeUnion, alpha: f64, delta: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(domain(format!("truncation must be positive, got {delta}")));
    }
    Ok(union_surface_measure(v).total_mass * delta.powf(-alpha) / alpha)
}

/// `∫_{V ∩ S^{d-1}} u uᵀ σ(du)` as a row-major `d × d` matrix. Exact in
/// `d = 2`; importance-sampled otherwise.
pub fn second_moment_matrix(v: &ConeUnion) -> Vec<f64> {
    let d = v.dimension();
    if d == 2 {
        let mut m = vec![0.0; 4];
        for (a, b) in planar_arcs(v) {
            let cc = |p: f64| 0.5 * p + 0.25 * (2.0 * p).sin();
            let ss = |p: f64| 0.5 * p - 0.25 * (2.0 * p).sin();
            let cs = |p: f64| 0.5 * p.sin() * p.sin();
            m[0] += cc(b) - cc(a);
            m[3] += ss(b) - ss(a);
            m[1] += cs(b) - cs(a);
        }
        m[2] = m[1];
        return m;
    }
    let measure = union_surface_measure(v);
    let cap_total: f64 = measure.cap_masses.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED ^ 0x2);
    let n = 1 << 18;
    let mut m = vec![0.0; d * d];
    for _ in 0..n {
        let u = sample_in_union(v, &measure.cap_masses, cap_total, &mut rng);
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] += u[i] * u[j];
            }
        }
    }
    m.iter().map(|x| x * measure.total_mass / n as f64).collect()
}
