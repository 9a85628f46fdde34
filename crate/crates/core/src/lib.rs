//! Analytics and simulation for symmetric pure-jump processes whose jump
//! kernel is comparable to `1_V(x - y) / |x - y|^{d+α}`, with `V` a finite
//! union of symmetric cones.
//!
//! * [`geometry`]: cones, unions, distances and two-jump meeting points.
//! * [`envelope`]: closed-form heat-kernel and Green-function envelopes.
//! * [`levy`]: spectral measure, characteristic exponent and the planar
//!   Fourier density oracle.
//! * [`simulate`]: compound-Poisson path simulation and Monte Carlo
//!   estimators.

pub mod envelope;
pub mod error;
pub mod geometry;
pub mod levy;
pub mod quad;
pub mod simulate;

pub use envelope::{green_envelope, hk_envelope, hk_envelope_product, EnvelopeValue, ModelParams};
pub use error::{Error, Result};
pub use geometry::{
    cone_contains, dist_to_cone, dist_to_union, meeting_points, union_contains, ConeUnion, MeetingSet, SymmetricCone,
    UnitVector,
};
pub use levy::{
    char_exponent, density_grid, fourier_density, green_from_oracle, tail_mass, union_surface_measure, DensityGrid,
    DensityOracle, SpectralMeasure, Symbol, Window,
};
pub use simulate::{
    estimate_density, estimate_exit_time, levy_system_check, simulate_levy_path, simulate_modulated_path,
    EstimatorResult, JumpSet, ModulatedKernel, PathConfig, PathRecord, SmallJumpPolicy,
};
