//! Monte Carlo estimators over many independent paths.
//!
//! Paths are split into fixed-size chunks; each chunk is reduced
//! sequentially and the chunk results are merged in index order, so every
//! estimate is bitwise identical for any number of worker threads.

// Argument guards are written `!(x > bound)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;

use super::kernel::{Intensity, JumpSet, ModulatedKernel};
use super::path::{Flow, PathConfig, SmallJumpPolicy, Walker};
use crate::error::{domain, Error, Result};
use crate::geometry::{norm, ConeUnion};

const CHUNK: usize = 2048;

fn chunked<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(Range<usize>) -> Result<T> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorResult {
    pub point_estimates: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub sample_count: usize,
    pub seed: u64,
    pub stream_id: u64,
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Kernel-density settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KdeOptions {
    /// `b` in the bandwidth `b · t^{1/α} · n^{-1/(d+4)}`.
    pub bandwidth_factor: f64,
    pub batches: usize,
}

impl Default for KdeOptions {
    fn default() -> Self {
        Self {
            bandwidth_factor: 1.0,
            batches: 20,
        }
    }
}

pub const MIN_DENSITY_PATHS: usize = 1000;

/// Product-Epanechnikov estimate of `p(t, x0, y)` at each probe, with
/// batch-means standard errors. Paths run to `t` rather than to the
/// configured horizon, which only has to be at least `t`.
pub fn estimate_density(
    t: f64,
    x0: &[f64],
    probes: &[Vec<f64>],
    n_paths: usize,
    config: &PathConfig,
    v: &ConeUnion,
    alpha: f64,
) -> Result<EstimatorResult> {
    estimate_density_with(t, x0, probes, n_paths, config, v, alpha, KdeOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn estimate_density_with(
    t: f64,
    x0: &[f64],
    probes: &[Vec<f64>],
    n_paths: usize,
    config: &PathConfig,
    v: &ConeUnion,
    alpha: f64,
    opts: KdeOptions,
) -> Result<EstimatorResult> {
    if n_paths < MIN_DENSITY_PATHS {
        return Err(Error::Estimator(format!(
            "density estimates need at least {MIN_DENSITY_PATHS} paths, got {n_paths}"
        )));
    }
    if !(t > 0.0 && t <= config.horizon) {
        return Err(domain(format!("need 0 < t <= horizon, got t = {t}")));
    }
    if opts.batches < 2 || opts.batches > n_paths || !(opts.bandwidth_factor > 0.0) {
        return Err(domain(
            "need >= 2 batches, no more than paths, and a positive bandwidth",
        ));
    }
    let d = v.dimension();
    if x0.len() != d || probes.iter().any(|p| p.len() != d) {
        return Err(domain("start point and probes must match the support dimension"));
    }
    let walker = Walker::new(v, alpha, config, None)?;
    let h = opts.bandwidth_factor * t.powf(1.0 / alpha) * (n_paths as f64).powf(-1.0 / (d as f64 + 4.0));
    let norm_const = (0.75 / h).powi(d as i32);
    let (nb, np) = (opts.batches, probes.len());
    let batch_of = |i: usize| i * nb / n_paths;

    let partials = chunked(n_paths, |range| {
        let mut sums = vec![0.0; nb * np];
        for i in range {
            let end = walker.run(x0, i as u64, t, |_| Flow::Continue)?;
            let b = batch_of(i);
            for (k, probe) in probes.iter().enumerate() {
                let mut w = norm_const;
                for (xi, yi) in end.position.iter().zip(probe) {
                    let u = (xi - yi) / h;
                    if u.abs() >= 1.0 {
                        w = 0.0;
                        break;
                    }
                    w *= 1.0 - u * u;
                }
                sums[b * np + k] += w;
            }
        }
        Ok(sums)
    })?;
    let mut sums = vec![0.0; nb * np];
    for part in &partials {
        for (s, p) in sums.iter_mut().zip(part) {
            *s += p;
        }
    }
    let mut sizes = vec![0usize; nb];
    (0..n_paths).for_each(|i| sizes[batch_of(i)] += 1);

    let mut point = Vec::with_capacity(np);
    let mut errors = Vec::with_capacity(np);
    for k in 0..np {
        let batch_means: Vec<f64> = (0..nb).map(|b| sums[b * np + k] / sizes[b] as f64).collect();
        let total: f64 = (0..nb).map(|b| sums[b * np + k]).sum();
        let (_, se) = mean_and_se(&batch_means);
        point.push(total / n_paths as f64);
        errors.push(se);
    }
    Ok(EstimatorResult {
        point_estimates: point,
        standard_errors: errors,
        sample_count: n_paths,
        seed: config.seed,
        stream_id: config.stream_id,
    })
}

/// Exit times from `B(x0, r)`, with `τ` recorded at the first jump landing
/// at distance `>= r`; paths still inside at the horizon are censored there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitTimeEstimate {
    /// Mean of `τ ∧ T` (one value) with its standard error.
    pub mean: EstimatorResult,
    pub radius: f64,
    pub horizon: f64,
    /// Per-path `τ ∧ T` in path order.
    pub exit_times: Vec<f64>,
    pub unexited: usize,
    pub curve_times: Vec<f64>,
    pub curve: Vec<f64>,
    pub curve_errors: Vec<f64>,
}

impl ExitTimeEstimate {
    /// `P(τ <= t)` and its binomial standard error at each time (all at most
    /// the horizon).
    pub fn exit_probability(&self, times: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.exit_times.len() as f64;
        let mut sorted = self.exit_times.clone();
        sorted.sort_by(f64::total_cmp);
        let censored_at = self.horizon;
        times
            .iter()
            .map(|&t| {
                let hits = sorted.partition_point(|s| *s <= t);
                // Censored paths sit exactly at the horizon without exiting.
                let hits = if t >= censored_at { hits - self.unexited } else { hits };
                let p = hits as f64 / n;
                (p, (p * (1.0 - p) / n).sqrt())
            })
            .unzip()
    }
}

pub fn estimate_exit_time(
    x0: &[f64],
    r: f64,
    n_paths: usize,
    config: &PathConfig,
    v: &ConeUnion,
    alpha: f64,
) -> Result<ExitTimeEstimate> {
    if !(r > 10.0 * config.truncation) {
        return Err(domain(format!(
            "radius {r} must exceed 10 × truncation = {}",
            10.0 * config.truncation
        )));
    }
    if n_paths < 2 {
        return Err(domain("need at least two paths"));
    }
    if x0.len() != v.dimension() {
        return Err(domain("start point must match the support dimension"));
    }
    let walker = Walker::new(v, alpha, config, None)?;
    let horizon = config.horizon;
    let parts = chunked(n_paths, |range| {
        let mut out = Vec::with_capacity(range.len());
        for i in range {
            let end = walker.run(x0, i as u64, horizon, |e| {
                let dx: Vec<f64> = e.after.iter().zip(x0).map(|(a, b)| a - b).collect();
                if norm(&dx) >= r {
                    Flow::Stop
                } else {
                    Flow::Continue
                }
            })?;
            out.push((end.time, !end.stopped));
        }
        Ok(out)
    })?;
    let flat: Vec<(f64, bool)> = parts.into_iter().flatten().collect();
    let unexited = flat.iter().filter(|p| p.1).count();
    if unexited as f64 >= 0.05 * n_paths as f64 {
        return Err(Error::HorizonTooShort {
            fraction_unexited: unexited as f64 / n_paths as f64,
            horizon,
        });
    }
    let exit_times: Vec<f64> = flat.iter().map(|p| p.0).collect();
    let (mean, se) = mean_and_se(&exit_times);
    let mut est = ExitTimeEstimate {
        mean: EstimatorResult {
            point_estimates: vec![mean],
            standard_errors: vec![se],
            sample_count: n_paths,
            seed: config.seed,
            stream_id: config.stream_id,
        },
        radius: r,
        horizon,
        exit_times,
        unexited,
        curve_times: Vec::new(),
        curve: Vec::new(),
        curve_errors: Vec::new(),
    };
    // Ten log-spaced times from mean/20 up to min(4·mean, T).
    let hi = (4.0 * mean).min(horizon);
    let lo = (mean / 20.0).min(hi);
    let times: Vec<f64> = (0..10).map(|k| lo * (hi / lo).powf(k as f64 / 9.0)).collect();
    let (p, e) = est.exit_probability(&times);
    est.curve_times = times;
    est.curve = p;
    est.curve_errors = e;
    Ok(est)
}

/// Both sides of the Lévy-system identity for `f(s, x, y) = 1_A(y - x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevySystemComparison {
    /// Mean number of jumps with increment in `A` up to the horizon.
    pub jump_count: f64,
    pub jump_count_se: f64,
    /// Mean of `∫_0^T ∫_A J(X_s, X_s + z) dz ds`.
    pub compensator: f64,
    pub compensator_se: f64,
    /// Standard error of the per-path difference.
    pub difference_se: f64,
    pub sample_count: usize,
}

impl LevySystemComparison {
    /// `|count − compensator| <= k · SE`; an exactly zero pair agrees.
    pub fn agrees(&self, k: f64) -> bool {
        let diff = (self.jump_count - self.compensator).abs();
        diff == 0.0 || diff <= k * self.difference_se
    }
}

pub fn levy_system_check(
    set: &JumpSet,
    x0: &[f64],
    n_paths: usize,
    config: &PathConfig,
    v: &ConeUnion,
    alpha: f64,
    kernel: Option<&dyn ModulatedKernel>,
) -> Result<LevySystemComparison> {
    if !(set.r_min > config.truncation) {
        return Err(domain(format!(
            "jump set must stay beyond the truncation: r_min = {} <= δ = {}",
            set.r_min, config.truncation
        )));
    }
    if config.small_jump_policy != SmallJumpPolicy::Drop {
        return Err(domain(
            "the compensator is integrated along piecewise-constant paths; use the drop policy",
        ));
    }
    if n_paths < 2 {
        return Err(domain("need at least two paths"));
    }
    let walker = Walker::new(v, alpha, config, kernel)?;
    let intensity: Intensity = match kernel {
        Some(k) => k.intensity(set, v, alpha)?,
        None => {
            let rate = set.levy_measure(v, alpha)?;
            Box::new(move |_| rate)
        }
    };
    let horizon = config.horizon;
    let parts = chunked(n_paths, |range| {
        let mut out = Vec::with_capacity(range.len());
        for i in range {
            let mut count = 0.0;
            let mut integral = 0.0;
            let mut last = 0.0;
            let end = walker.run(x0, i as u64, horizon, |e| {
                integral += (e.time - last) * intensity(e.before);
                last = e.time;
                if set.contains(e.jump) {
                    count += 1.0;
                }
                Flow::Continue
            })?;
            integral += (horizon - last) * intensity(&end.position);
            out.push((count, integral));
        }
        Ok(out)
    })?;
    let flat: Vec<(f64, f64)> = parts.into_iter().flatten().collect();
    let counts: Vec<f64> = flat.iter().map(|p| p.0).collect();
    let comps: Vec<f64> = flat.iter().map(|p| p.1).collect();
    let diffs: Vec<f64> = flat.iter().map(|p| p.0 - p.1).collect();
    let (jump_count, jump_count_se) = mean_and_se(&counts);
    let (compensator, compensator_se) = mean_and_se(&comps);
    let (_, difference_se) = mean_and_se(&diffs);
    Ok(LevySystemComparison {
        jump_count,
        jump_count_se,
        compensator,
        compensator_se,
        difference_se,
        sample_count: n_paths,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};

    use super::*;
    use crate::geometry::{SymmetricCone, UnitVector};
    use crate::levy::tail_mass;
    use crate::simulate::kernel::{Directions, SineModulation};

    fn quarter() -> ConeUnion {
        ConeUnion::single(SymmetricCone::new(UnitVector::from_angle(0.0), FRAC_PI_4).unwrap())
    }

    #[test]
    fn density_refuses_small_samples() {
        let cfg = PathConfig::new(1.0, 0.05).unwrap();
        let err = estimate_density(1.0, &[0.0, 0.0], &[vec![0.0, 0.0]], 999, &cfg, &quarter(), 1.0);
        assert!(matches!(err, Err(Error::Estimator(_))));
        assert!(estimate_density(2.0, &[0.0, 0.0], &[vec![0.0, 0.0]], 5000, &cfg, &quarter(), 1.0).is_err());
    }

    #[test]
    fn density_is_thread_count_invariant() {
        let cfg = PathConfig::new(1.0, 0.1).unwrap().with_seed(77);
        let probes = vec![vec![0.0, 0.0], vec![0.5, 0.2]];
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_density(1.0, &[0.0, 0.0], &probes, 9000, &cfg, &quarter(), 1.3).unwrap())
        };
        let (a, b) = (run(1), run(3));
        assert_eq!(a, b);
        assert!(a.standard_errors.iter().all(|s| *s > 0.0));
    }

    #[test]
    fn levy_case_matches_poisson_counting() {
        let v = quarter();
        let cfg = PathConfig::new(2.0, 0.05).unwrap().with_seed(5);
        let set = JumpSet::beyond(0.2);
        let cmp = levy_system_check(&set, &[0.0, 0.0], 10_000, &cfg, &v, 1.2, None).unwrap();
        let exact = 2.0 * tail_mass(&v, 1.2, 0.2).unwrap();
        assert!((cmp.compensator - exact).abs() < 1e-9 * exact);
        assert!(cmp.agrees(3.0), "{cmp:?}");
    }

    #[test]
    fn disjoint_set_is_zero_on_both_sides() {
        let v = quarter();
        let w = ConeUnion::single(SymmetricCone::new(UnitVector::from_angle(PI / 2.0), FRAC_PI_8).unwrap());
        let set = JumpSet {
            r_min: 0.2,
            r_max: f64::INFINITY,
            directions: Directions::Within(w),
        };
        let cfg = PathConfig::new(1.0, 0.05).unwrap();
        let cmp = levy_system_check(&set, &[0.0, 0.0], 500, &cfg, &v, 1.0, None).unwrap();
        assert_eq!((cmp.jump_count, cmp.compensator), (0.0, 0.0));
        assert!(cmp.agrees(3.0));
    }

    #[test]
    fn sine_modulated_identity() {
        let v = quarter();
        let cfg = PathConfig::new(2.0, 0.05).unwrap().with_seed(8);
        let set = JumpSet {
            r_min: 0.1,
            r_max: 3.0,
            directions: Directions::Any,
        };
        let sine = SineModulation::new(0.5).unwrap();
        let cmp = levy_system_check(&set, &[0.3, 0.0], 4000, &cfg, &v, 1.0, Some(&sine)).unwrap();
        assert!(cmp.agrees(3.0), "{cmp:?}");
    }

    #[test]
    fn exit_time_guards() {
        let v = quarter();
        let cfg = PathConfig::new(0.01, 0.05).unwrap();
        assert!(estimate_exit_time(&[0.0, 0.0], 0.4, 100, &cfg, &v, 1.0).is_err());
        let err = estimate_exit_time(&[0.0, 0.0], 2.0, 200, &cfg, &v, 1.0).unwrap_err();
        assert!(matches!(err, Error::HorizonTooShort { .. }));
    }

    #[test]
    fn exit_probability_is_monotone_in_radius() {
        let v = quarter();
        let cfg = PathConfig::new(500.0, 0.05).unwrap().with_seed(3);
        let t = [0.5];
        let mut prev = 1.0;
        for r in [1.0, 2.0, 4.0] {
            let est = estimate_exit_time(&[0.0, 0.0], r, 2000, &cfg, &v, 1.0).unwrap();
            let p = est.exit_probability(&t).0[0];
            assert!(p <= prev);
            prev = p;
            assert!(est.curve.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
