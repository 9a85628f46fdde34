//! Compound-Poisson paths for the jumps longer than `δ`, optionally thinned
//! by a state-dependent modulation.

use std::io::{self, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::kernel::ModulatedKernel;
use super::rng::{path_rng, Lane};
use super::sampling::JumpSampler;
use crate::error::{domain, Error, Result};
use crate::geometry::{norm, ConeUnion};

/// What happens to the jumps of size at most `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallJumpPolicy {
    /// Discard them. The measure is symmetric, so no drift is lost.
    #[default]
    Drop,
    /// Replace them by a Gaussian increment with the same covariance.
    GaussianMomentMatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub horizon: f64,
    pub truncation: f64,
    #[serde(default)]
    pub small_jump_policy: SmallJumpPolicy,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub stream_id: u64,
}

impl PathConfig {
    pub fn new(horizon: f64, truncation: f64) -> Result<Self> {
        let c = Self {
            horizon,
            truncation,
            small_jump_policy: SmallJumpPolicy::Drop,
            seed: 0,
            stream_id: 0,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_stream(mut self, stream_id: u64) -> Self {
        self.stream_id = stream_id;
        self
    }

    pub fn with_policy(mut self, policy: SmallJumpPolicy) -> Self {
        self.small_jump_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(domain(format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.truncation > 0.0 && self.truncation.is_finite()) {
            return Err(domain(format!("truncation must be positive, got {}", self.truncation)));
        }
        Ok(())
    }
}

/// One trajectory on `[0, horizon]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathRecord {
    pub origin: Vec<f64>,
    pub horizon: f64,
    pub jump_times: Vec<f64>,
    /// Jump increments `X_s - X_{s-}`.
    pub jumps: Vec<Vec<f64>>,
    /// `X_s` right after each jump.
    pub positions: Vec<Vec<f64>>,
    pub terminal: Vec<f64>,
}

impl PathRecord {
    /// Position at time `t`: the last position at or before `t`. Exact for
    /// the drop policy, where paths are piecewise constant.
    pub fn position_at(&self, t: f64) -> &[f64] {
        let k = self.jump_times.partition_point(|s| *s <= t);
        if k == 0 {
            &self.origin
        } else {
            &self.positions[k - 1]
        }
    }
}

/// Writes `path_id,jump_time,x1,...,xd`, starting each path with its origin
/// at time 0.
pub fn write_paths_csv<W: Write>(mut out: W, paths: &[PathRecord]) -> io::Result<()> {
    let d = paths.first().map_or(2, |p| p.origin.len());
    let coords: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    writeln!(
        out,
        "# columns: path_id (index), jump_time (time), {} (position after the jump)",
        coords.join(", ")
    )?;
    writeln!(out, "path_id,jump_time,{}", coords.join(","))?;
    let row = |out: &mut W, id: usize, t: f64, x: &[f64]| -> io::Result<()> {
        write!(out, "{id},{t}")?;
        for c in x {
            write!(out, ",{c}")?;
        }
        writeln!(out)
    };
    for (id, p) in paths.iter().enumerate() {
        row(&mut out, id, 0.0, &p.origin)?;
        for (t, x) in p.jump_times.iter().zip(&p.positions) {
            row(&mut out, id, *t, x)?;
        }
    }
    Ok(())
}

pub(crate) struct JumpEvent<'e> {
    pub time: f64,
    pub before: &'e [f64],
    pub jump: &'e [f64],
    pub after: &'e [f64],
}

pub(crate) enum Flow {
    Continue,
    Stop,
}

pub(crate) struct PathEnd {
    pub time: f64,
    pub position: Vec<f64>,
    pub stopped: bool,
}

/// Shared path engine. Waiting times and proposals come from the jump lane,
/// acceptance uniforms from the thinning lane, Gaussian increments from the
/// diffusion lane; with `κ = 1` and `m ≡ 1` the accepted sequence is
/// therefore identical to the unmodulated one.
pub(crate) struct Walker<'a> {
    sampler: JumpSampler,
    config: &'a PathConfig,
    kernel: Option<&'a dyn ModulatedKernel>,
    chol: Option<Vec<f64>>,
}

impl<'a> Walker<'a> {
    pub fn new(
        v: &ConeUnion,
        alpha: f64,
        config: &'a PathConfig,
        kernel: Option<&'a dyn ModulatedKernel>,
    ) -> Result<Self> {
        config.validate()?;
        if let Some(k) = kernel {
            if !(k.kappa() >= 1.0 && k.kappa().is_finite()) {
                return Err(domain(format!("kappa must be >= 1, got {}", k.kappa())));
            }
        }
        let sampler = JumpSampler::new(v, alpha, config.truncation)?;
        let chol = match config.small_jump_policy {
            SmallJumpPolicy::Drop => None,
            SmallJumpPolicy::GaussianMomentMatch => Some(cholesky(&sampler.small_jump_covariance(), v.dimension())),
        };
        Ok(Self {
            sampler,
            config,
            kernel,
            chol,
        })
    }

    pub fn run<F>(&self, x0: &[f64], path: u64, horizon: f64, mut on_jump: F) -> Result<PathEnd>
    where
        F: FnMut(&JumpEvent<'_>) -> Flow,
    {
        let (seed, stream) = (self.config.seed, self.config.stream_id);
        let mut jumps = path_rng(seed, stream, Lane::Jumps, path);
        let mut thin = self.kernel.map(|_| path_rng(seed, stream, Lane::Thinning, path));
        let mut gauss = self
            .chol
            .as_ref()
            .map(|_| path_rng(seed, stream, Lane::Diffusion, path));
        let kappa = self.kernel.map_or(1.0, |k| k.kappa());
        let rate = kappa * self.sampler.rate();
        let d = x0.len();
        let mut x = x0.to_vec();
        let mut after = vec![0.0; d];
        let mut time = 0.0;
        loop {
            let wait: f64 = jumps.sample::<f64, _>(Exp1) / rate;
            if time + wait > horizon {
                self.diffuse(&mut x, horizon - time, gauss.as_mut());
                return Ok(PathEnd {
                    time: horizon,
                    position: x,
                    stopped: false,
                });
            }
            time += wait;
            self.diffuse(&mut x, wait, gauss.as_mut());
            let z = self.sampler.jump(&mut jumps);
            for i in 0..d {
                after[i] = x[i] + z[i];
            }
            if let (Some(k), Some(rng)) = (self.kernel, thin.as_mut()) {
                let m = k.modulation(&x, &after);
                if !(m >= 1.0 / kappa * (1.0 - 1e-12) && m <= kappa * (1.0 + 1e-12)) {
                    return Err(Error::Contract(format!(
                        "modulation {m} outside [1/κ, κ] with κ = {kappa}"
                    )));
                }
                if rng.random::<f64>() * kappa >= m {
                    continue;
                }
            }
            debug_assert!(self.sampler.union().contains_raw(&z) && norm(&z) >= self.config.truncation);
            let event = JumpEvent {
                time,
                before: &x,
                jump: &z,
                after: &after,
            };
            let flow = on_jump(&event);
            std::mem::swap(&mut x, &mut after);
            if let Flow::Stop = flow {
                return Ok(PathEnd {
                    time,
                    position: x,
                    stopped: true,
                });
            }
        }
    }

    fn diffuse(&self, x: &mut [f64], dt: f64, rng: Option<&mut ChaCha8Rng>) {
        let (Some(l), Some(rng)) = (self.chol.as_ref(), rng) else {
            return;
        };
        if dt <= 0.0 {
            return;
        }
        let d = x.len();
        let g: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let s = dt.sqrt();
        for i in 0..d {
            let mut acc = 0.0;
            for j in 0..=i {
                acc += l[i * d + j] * g[j];
            }
            x[i] += s * acc;
        }
    }

    pub fn record(&self, x0: &[f64], path: u64, horizon: f64) -> Result<PathRecord> {
        let mut rec = PathRecord {
            origin: x0.to_vec(),
            horizon,
            jump_times: Vec::new(),
            jumps: Vec::new(),
            positions: Vec::new(),
            terminal: Vec::new(),
        };
        let end = self.run(x0, path, horizon, |e| {
            rec.jump_times.push(e.time);
            rec.jumps.push(e.jump.to_vec());
            rec.positions.push(e.after.to_vec());
            Flow::Continue
        })?;
        rec.terminal = end.position;
        Ok(rec)
    }
}

/// Lower-triangular factor of a symmetric positive semi-definite matrix;
/// non-positive pivots (flat directions) give zero columns.
fn cholesky(a: &[f64], d: usize) -> Vec<f64> {
    let mut l = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= l[i * d + k] * l[j * d + k];
            }
            if i == j {
                l[i * d + i] = s.max(0.0).sqrt();
            } else if l[j * d + j] > 0.0 {
                l[i * d + j] = s / l[j * d + j];
            }
        }
    }
    l
}

fn check_origin(x0: &[f64], v: &ConeUnion) -> Result<()> {
    if x0.len() != v.dimension() {
        return Err(domain(format!(
            "start point has dimension {}, support has {}",
            x0.len(),
            v.dimension()
        )));
    }
    Ok(())
}

/// Path `path_index` of the stream described by `config`.
pub fn simulate_levy_path(
    x0: &[f64],
    config: &PathConfig,
    v: &ConeUnion,
    alpha: f64,
    path_index: u64,
) -> Result<PathRecord> {
    check_origin(x0, v)?;
    Walker::new(v, alpha, config, None)?.record(x0, path_index, config.horizon)
}

/// Thinned path for the kernel `m · J^α`: proposals at rate `κ · tail_mass`,
/// each accepted with probability `m(x, x+z) / κ`.
pub fn simulate_modulated_path(
    x0: &[f64],
    config: &PathConfig,
    v: &ConeUnion,
    alpha: f64,
    kernel: &dyn ModulatedKernel,
    path_index: u64,
) -> Result<PathRecord> {
    check_origin(x0, v)?;
    Walker::new(v, alpha, config, Some(kernel))?.record(x0, path_index, config.horizon)
}
