//! Benchmark fixtures shared by the criterion targets.

use std::f64::consts::FRAC_PI_4;

use conekernel::{ConeUnion, SymmetricCone, UnitVector};

/// The reference model: one cone around `e₁` with half-angle π/4.
pub fn quarter_cone() -> ConeUnion {
    ConeUnion::single(SymmetricCone::new(UnitVector::from_angle(0.0), FRAC_PI_4).expect("valid aperture"))
}

/// Two cones whose arcs overlap, exercising the multiplicity bookkeeping.
pub fn overlapping_pair() -> ConeUnion {
    let cone = |a: f64| SymmetricCone::new(UnitVector::from_angle(a), 0.6).expect("valid aperture");
    ConeUnion::new(2, vec![cone(0.0), cone(0.9)]).expect("planar cones")
}
