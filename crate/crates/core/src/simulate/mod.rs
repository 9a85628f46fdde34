//! Path simulation for the truncated process and Monte Carlo estimators.

mod estimators;
mod kernel;
mod path;
mod rng;
mod sampling;

pub use estimators::{
    estimate_density, estimate_density_with, estimate_exit_time, levy_system_check, EstimatorResult, ExitTimeEstimate,
    KdeOptions, LevySystemComparison, MIN_DENSITY_PATHS,
};
pub use kernel::{ConstantModulation, Directions, Intensity, JumpSet, ModulatedKernel, SineModulation};
pub use path::{simulate_levy_path, simulate_modulated_path, write_paths_csv, PathConfig, PathRecord, SmallJumpPolicy};
pub use rng::{path_rng, Lane};
pub use sampling::{sample_direction, sample_jump, JumpSampler};
