//! TOML experiment configuration.
//!
//! ```toml
//! seed = 7
//!
//! [model]
//! dimension = 2
//! alpha = 1.0
//! cones = [{ axis = [1.0, 0.0], aperture = 0.7853981633974483 }]
//!
//! [experiment]
//! kind = "green"
//! distances = [1.0, 2.0, 4.0, 8.0]
//! ```
//!
//! Every experiment field has a default, so `kind` alone is a valid
//! experiment table.

use std::f64::consts::FRAC_PI_4;
use std::path::{Path, PathBuf};

use conekernel::geometry::{ConeUnion, SymmetricCone, UnitVector};
use conekernel::simulate::SmallJumpPolicy;
use conekernel::ModelParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    /// Run directory; defaults to `runs/<kind>-<config hash prefix>`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Quadrature tolerance override for oracle evaluations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default)]
    pub model: ModelConfig,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dimension: usize,
    pub alpha: f64,
    #[serde(default = "one")]
    pub kappa: f64,
    pub cones: Vec<ConeSpec>,
}

fn one() -> f64 {
    1.0
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            alpha: 1.0,
            kappa: 1.0,
            cones: vec![ConeSpec {
                axis: vec![1.0, 0.0],
                aperture: FRAC_PI_4,
            }],
        }
    }
}

/// Axis (normalized on load) and aperture in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSpec {
    pub axis: Vec<f64>,
    pub aperture: f64,
}

impl ModelConfig {
    pub fn union(&self) -> Result<ConeUnion, HarnessError> {
        let cones = self
            .cones
            .iter()
            .map(|c| SymmetricCone::new(UnitVector::new(c.axis.clone())?, c.aperture))
            .collect::<conekernel::Result<Vec<_>>>()
            .map_err(HarnessError::config)?;
        ConeUnion::new(self.dimension, cones).map_err(HarnessError::config)
    }

    pub fn params(&self) -> Result<ModelParams, HarnessError> {
        ModelParams::new(self.alpha, self.dimension, self.kappa).map_err(HarnessError::config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    Geom(GeomParams),
    Phi(PhiParams),
    Density(DensityParams),
    Simulate(SimulateParams),
    VerifyEnvelope(EnvelopeParams),
    ExitTime(ExitTimeParams),
    Green(GreenParams),
    LevySystem(LevySystemParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Geom(_) => "geom",
            Experiment::Phi(_) => "phi",
            Experiment::Density(_) => "density",
            Experiment::Simulate(_) => "simulate",
            Experiment::VerifyEnvelope(_) => "verify-envelope",
            Experiment::ExitTime(_) => "exit-time",
            Experiment::Green(_) => "green",
            Experiment::LevySystem(_) => "levy-system",
        }
    }

    pub fn default_for(name: &str) -> Option<Self> {
        Some(match name {
            "geom" => Experiment::Geom(Default::default()),
            "phi" => Experiment::Phi(Default::default()),
            "density" => Experiment::Density(Default::default()),
            "simulate" => Experiment::Simulate(Default::default()),
            "verify-envelope" => Experiment::VerifyEnvelope(Default::default()),
            "exit-time" => Experiment::ExitTime(Default::default()),
            "green" => Experiment::Green(Default::default()),
            "levy-system" => Experiment::LevySystem(Default::default()),
            _ => return None,
        })
    }

    /// Whether the experiment needs the planar Fourier oracle.
    fn needs_oracle(&self) -> bool {
        matches!(
            self,
            Experiment::Density(_) | Experiment::Simulate(_) | Experiment::VerifyEnvelope(_) | Experiment::Green(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeomParams {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Index of the cone whose meeting set is reported; `None` picks the
    /// cone nearest to `y - x`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cone: Option<usize>,
}

impl Default for GeomParams {
    fn default() -> Self {
        Self {
            x: vec![0.0, 0.0],
            y: vec![2.0, 0.0],
            cone: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhiParams {
    pub directions: usize,
    pub radii: Vec<f64>,
    pub homogeneity_samples: usize,
    pub homogeneity_tol: f64,
}

impl Default for PhiParams {
    fn default() -> Self {
        Self {
            directions: 360,
            radii: vec![0.5, 1.0, 4.0],
            homogeneity_samples: 100,
            homogeneity_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityParams {
    pub times: Vec<f64>,
    pub resolution: usize,
    /// Grid half-width in units of `t^{1/α}`.
    pub window_factor: f64,
    pub mass_tol: f64,
    pub diagonal_times: Vec<f64>,
    pub diagonal_tol: f64,
}

impl Default for DensityParams {
    fn default() -> Self {
        Self {
            times: vec![0.5, 1.0, 2.0],
            resolution: 512,
            window_factor: 20.0,
            mass_tol: 1e-3,
            diagonal_times: vec![0.25, 1.0, 4.0],
            diagonal_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateParams {
    pub time: f64,
    pub n_paths: usize,
    /// `δ` in units of `t^{1/α}`.
    pub truncation_factor: f64,
    pub small_jump_policy: SmallJumpPolicy,
    /// Probe points; defaults to a 3 × 3 grid with spacing `t^{1/α}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<Vec<f64>>>,
    pub bandwidth_factor: f64,
    /// Probes with `q < min_density_factor · t^{-2/α}` are reported but
    /// not checked.
    pub min_density_factor: f64,
    pub rel_tol: f64,
    /// Number of paths written to `paths.csv`.
    pub write_paths: usize,
}

impl Default for SimulateParams {
    fn default() -> Self {
        Self {
            time: 1.0,
            n_paths: 1_000_000,
            truncation_factor: 0.05,
            small_jump_policy: SmallJumpPolicy::Drop,
            probes: None,
            bandwidth_factor: 3.0,
            min_density_factor: 0.01,
            rel_tol: 0.15,
            write_paths: 50,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvelopeParams {
    pub times: Vec<f64>,
    /// Probe radii per ray family (three families: axis, boundary,
    /// farthest-from-support), in units of `t^{1/α}`.
    pub radii: Vec<f64>,
    pub fit_time: f64,
    pub fit_range: [f64; 2],
    pub fit_points: usize,
    pub axis_exponent_tol: f64,
    pub far_exponent_tol: f64,
    pub spread_limit: f64,
}

impl Default for EnvelopeParams {
    fn default() -> Self {
        let radii = (0..20).map(|k| 0.25 * 160f64.powf(k as f64 / 19.0)).collect();
        Self {
            times: vec![0.5, 1.0, 2.0],
            radii,
            fit_time: 1.0,
            fit_range: [5.0, 40.0],
            fit_points: 16,
            axis_exponent_tol: 0.15,
            far_exponent_tol: 0.2,
            spread_limit: 1e3,
        }
    }
}

/// How the truncation scales across radii.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationMode {
    Fixed,
    /// `δ = r · truncation`.
    Proportional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExitTimeParams {
    pub radii: Vec<f64>,
    pub n_paths: usize,
    pub truncation: f64,
    pub truncation_mode: TruncationMode,
    /// Defaults to a horizon at which a jump longer than the ball's
    /// diameter has occurred with probability `1 - e^{-10}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    pub slope_tol: f64,
    /// Radius pair `(r, 2r)` compared by the scaling-collapse check, always
    /// simulated with `δ = r / 20`.
    pub collapse_radius: f64,
    pub collapse_points: usize,
    pub collapse_sigmas: f64,
}

impl Default for ExitTimeParams {
    fn default() -> Self {
        Self {
            radii: vec![1.0, 2.0, 4.0, 8.0],
            n_paths: 10_000,
            truncation: 0.05,
            truncation_mode: TruncationMode::Fixed,
            horizon: None,
            slope_tol: 0.1,
            collapse_radius: 1.0,
            collapse_points: 10,
            collapse_sigmas: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GreenParams {
    pub distances: Vec<f64>,
    /// Direction of `y - x`; normalized on use.
    pub direction: Vec<f64>,
    pub slope_tol: f64,
}

impl Default for GreenParams {
    fn default() -> Self {
        Self {
            distances: vec![1.0, 2.0, 4.0, 8.0],
            direction: vec![0.6, 0.8],
            slope_tol: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LevySystemParams {
    pub horizon: f64,
    pub n_paths: usize,
    pub truncation: f64,
    pub start: Vec<f64>,
    /// Jump set `{r_min < |z| < r_max}` for the unmodulated check.
    pub r_min: f64,
    pub r_max: f64,
    /// Bounded jump set for the modulated check.
    pub modulated_r_max: f64,
    /// `m(x, y) = 1 + a sin(x₁ + y₁)`.
    pub amplitude: f64,
    pub sigmas: f64,
}

impl Default for LevySystemParams {
    fn default() -> Self {
        Self {
            horizon: 2.0,
            n_paths: 10_000,
            truncation: 0.05,
            start: vec![0.3, 0.0],
            r_min: 0.1,
            r_max: f64::INFINITY,
            modulated_r_max: 3.0,
            amplitude: 0.5,
            sigmas: 3.0,
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            seed: 0,
            output_dir: None,
            tol: None,
            model: ModelConfig::default(),
            experiment,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(HarnessError::config)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("configs serialize to TOML")
    }

    /// SHA-256 of the canonical TOML serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let v = self.model.union()?;
        self.model.params()?;
        if let Some(tol) = self.tol {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(HarnessError::Config(format!("tol must lie in (0, 1), got {tol}")));
            }
        }
        if self.experiment.needs_oracle() && v.dimension() != 2 {
            return Err(HarnessError::Config(format!(
                "{} uses the planar Fourier oracle and needs dimension 2, got {}",
                self.experiment.name(),
                v.dimension()
            )));
        }
        let d = v.dimension();
        let positive = |what: &str, xs: &[f64]| -> Result<(), HarnessError> {
            if xs.is_empty() || xs.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(HarnessError::Config(format!(
                    "{what} must be a nonempty list of positive numbers"
                )));
            }
            Ok(())
        };
        let bad = |msg: String| Err(HarnessError::Config(msg));
        match &self.experiment {
            Experiment::Geom(p) => {
                if p.x.len() != d || p.y.len() != d {
                    return bad(format!("x and y must have dimension {d}"));
                }
                if let Some(i) = p.cone {
                    if i >= v.cones().len() {
                        return bad(format!("cone index {i} out of range"));
                    }
                }
            }
            Experiment::Phi(p) => {
                positive("radii", &p.radii)?;
                if p.directions == 0 {
                    return bad("directions must be positive".into());
                }
            }
            Experiment::Density(p) => {
                positive("times", &p.times)?;
                positive("diagonal_times", &p.diagonal_times)?;
                if p.resolution < 4 || p.resolution % 2 != 0 {
                    return bad(format!("resolution must be even and >= 4, got {}", p.resolution));
                }
                positive("window_factor", &[p.window_factor])?;
            }
            Experiment::Simulate(p) => {
                positive(
                    "time, truncation_factor, bandwidth_factor",
                    &[p.time, p.truncation_factor, p.bandwidth_factor],
                )?;
                if let Some(probes) = &p.probes {
                    if probes.iter().any(|q| q.len() != d) {
                        return bad(format!("probes must have dimension {d}"));
                    }
                }
            }
            Experiment::VerifyEnvelope(p) => {
                positive("times", &p.times)?;
                positive("radii", &p.radii)?;
                if !(p.fit_range[0] > 0.0 && p.fit_range[1] > p.fit_range[0]) || p.fit_points < 2 {
                    return bad("fit_range must be increasing and positive, with at least two fit points".into());
                }
            }
            Experiment::ExitTime(p) => {
                positive("radii", &p.radii)?;
                positive("truncation", &[p.truncation])?;
                if p.radii.len() < 2 {
                    return bad("the slope fit needs at least two radii".into());
                }
            }
            Experiment::Green(p) => {
                positive("distances", &p.distances)?;
                if p.direction.len() != d || p.direction.iter().all(|c| *c == 0.0) {
                    return bad(format!("direction must be a nonzero vector of dimension {d}"));
                }
            }
            Experiment::LevySystem(p) => {
                positive("horizon, truncation", &[p.horizon, p.truncation])?;
                if p.start.len() != d {
                    return bad(format!("start must have dimension {d}"));
                }
                if !(p.r_min > p.truncation && p.r_max > p.r_min && p.modulated_r_max > p.r_min) {
                    return bad("need truncation < r_min < r_max".into());
                }
                if d != 2 {
                    return bad("levy-system needs dimension 2".into());
                }
            }
        }
        Ok(())
    }
}
