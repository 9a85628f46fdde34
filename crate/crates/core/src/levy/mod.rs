//! Lévy-measure analytics for `ν(dz) = 1_V(z) |z|^{-d-α} dz`.

mod density;
mod exponent;
mod lattice;
mod spectral;

pub use density::{fourier_density, green_from_oracle, DensityOracle, DensityValue};
pub use exponent::{char_exponent, stable_constant, stable_constant_with_error, Symbol};
pub use lattice::{density_grid, DensityGrid, LatticeSymbol, QuadratureMeta, Window};
pub use spectral::{
    cap_surface_measure, second_moment_matrix, sphere_area, tail_mass, union_surface_measure, MassEstimate, MassMethod,
    SpectralMeasure,
};

pub(crate) use spectral::{planar_arcs, sample_in_union};
