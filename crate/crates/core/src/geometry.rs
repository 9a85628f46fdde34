//! Symmetric cones, finite unions of them, and the two-jump meeting set.
//!
//! A symmetric cone `Γ(λ, θ)` is the set of nonzero `z` whose angle to the
//! line spanned by `λ` is strictly less than `θ`. The boundary is excluded,
//! so `cone_contains` uses a strict inequality.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Absolute tolerance for "on the cone boundary" decisions, applied after
/// scaling the displacement to unit length.
pub const BOUNDARY_TOL: f64 = 1e-9;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A direction on the unit sphere `S^{d-1}`, `d >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    /// Normalizes any nonzero vector of dimension at least two.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.len() < 2 {
            return Err(domain(format!("unit vector needs d >= 2, got {}", components.len())));
        }
        if components.iter().any(|c| !c.is_finite()) {
            return Err(domain("unit vector components must be finite"));
        }
        let n = norm(&components);
        if n == 0.0 {
            return Err(domain("cannot normalize the zero vector"));
        }
        Ok(Self(components.into_iter().map(|c| c / n).collect()))
    }

    /// Standard basis vector `e_i` in dimension `d`.
    pub fn basis(d: usize, i: usize) -> Result<Self> {
        if i >= d {
            return Err(domain(format!("basis index {i} out of range for d = {d}")));
        }
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        Self::new(v)
    }

    /// Unit vector at planar angle `angle` (radians) in `d = 2`.
    pub fn from_angle(angle: f64) -> Self {
        Self(vec![angle.cos(), angle.sin()])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for UnitVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<UnitVector> for Vec<f64> {
    fn from(u: UnitVector) -> Self {
        u.0
    }
}

#[derive(Deserialize)]
struct RawCone {
    axis: UnitVector,
    aperture: f64,
}

impl TryFrom<RawCone> for SymmetricCone {
    type Error = Error;

    fn try_from(raw: RawCone) -> Result<Self> {
        Self::new(raw.axis, raw.aperture)
    }
}

#[derive(Deserialize)]
struct RawUnion {
    dimension: usize,
    cones: Vec<SymmetricCone>,
}

impl TryFrom<RawUnion> for ConeUnion {
    type Error = Error;

    fn try_from(raw: RawUnion) -> Result<Self> {
        Self::new(raw.dimension, raw.cones)
    }
}

/// `Γ(axis, aperture)`: both nappes of the circular cone around `axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCone")]
pub struct SymmetricCone {
    axis: UnitVector,
    aperture: f64,
}

impl SymmetricCone {
    /// Apertures in `(0, π/2]` are accepted; `π/2` gives a pair of open
    /// half-spaces.
    pub fn new(axis: UnitVector, aperture: f64) -> Result<Self> {
        if !(aperture > 0.0 && aperture <= std::f64::consts::FRAC_PI_2) {
            return Err(domain(format!("aperture must lie in (0, pi/2], got {aperture}")));
        }
        Ok(Self { axis, aperture })
    }

    pub fn axis(&self) -> &UnitVector {
        &self.axis
    }

    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn dim(&self) -> usize {
        self.axis.dim()
    }

    /// Strict membership, no dimension or zero checks.
    pub(crate) fn contains_raw(&self, z: &[f64]) -> bool {
        dot(self.axis.as_slice(), z).abs() > norm(z) * self.aperture.cos()
    }

    /// Angle between `w` and the axis line, in `[0, π/2]`.
    pub(crate) fn axis_angle(&self, w: &[f64]) -> f64 {
        let c = (dot(self.axis.as_slice(), w).abs() / norm(w)).min(1.0);
        c.acos()
    }
}

fn check_point(d: usize, z: &[f64]) -> Result<()> {
    if z.len() != d {
        return Err(domain(format!("point has dimension {}, expected {d}", z.len())));
    }
    if z.iter().any(|c| !c.is_finite()) {
        return Err(domain("point has non-finite coordinates"));
    }
    Ok(())
}

fn check_nonzero(d: usize, z: &[f64]) -> Result<()> {
    check_point(d, z)?;
    if z.iter().all(|&c| c == 0.0) {
        return Err(domain("cone membership is undefined at the origin"));
    }
    Ok(())
}

/// True iff `z` lies strictly inside `Γ`.
pub fn cone_contains(cone: &SymmetricCone, z: &[f64]) -> Result<bool> {
    check_nonzero(cone.dim(), z)?;
    Ok(cone.contains_raw(z))
}

/// Euclidean distance from `w` to the cone `Γ`; zero at the origin.
pub fn dist_to_cone(cone: &SymmetricCone, w: &[f64]) -> f64 {
    let r = norm(w);
    if r == 0.0 {
        return 0.0;
    }
    let excess = (cone.axis_angle(w) - cone.aperture).max(0.0);
    r * excess.sin()
}

/// `V`: a finite nonempty union of symmetric cones in a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawUnion")]
pub struct ConeUnion {
    dimension: usize,
    cones: Vec<SymmetricCone>,
}

impl ConeUnion {
    pub fn new(dimension: usize, cones: Vec<SymmetricCone>) -> Result<Self> {
        if dimension < 2 {
            return Err(domain(format!("dimension must be >= 2, got {dimension}")));
        }
        if cones.is_empty() {
            return Err(domain("a cone union needs at least one cone"));
        }
        if let Some(c) = cones.iter().find(|c| c.dim() != dimension) {
            return Err(domain(format!(
                "cone axis has dimension {}, union has {dimension}",
                c.dim()
            )));
        }
        Ok(Self { dimension, cones })
    }

    /// Convenience for a single cone.
    pub fn single(cone: SymmetricCone) -> Self {
        Self {
            dimension: cone.dim(),
            cones: vec![cone],
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cones(&self) -> &[SymmetricCone] {
        &self.cones
    }

    pub(crate) fn contains_raw(&self, z: &[f64]) -> bool {
        self.cones.iter().any(|c| c.contains_raw(z))
    }

    /// Number of cones whose interior contains `z`.
    pub(crate) fn multiplicity(&self, z: &[f64]) -> usize {
        self.cones.iter().filter(|c| c.contains_raw(z)).count()
    }

    /// The cone achieving `dist_to_union(self, w)` and that distance. Ties
    /// go to the lowest index.
    pub fn nearest_cone(&self, w: &[f64]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, c) in self.cones.iter().enumerate() {
            let d = dist_to_cone(c, w);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }
}

pub fn union_contains(v: &ConeUnion, z: &[f64]) -> Result<bool> {
    check_nonzero(v.dimension, z)?;
    Ok(v.contains_raw(z))
}

pub fn dist_to_union(v: &ConeUnion, w: &[f64]) -> f64 {
    v.nearest_cone(w).1
}

/// The set `S(Γ, x, y)` of two-jump meeting points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeetingSet {
    /// `{x, y}` when `y - x` lies in the closed cone, otherwise the two
    /// symmetric minimizers `z` and `x + y - z`.
    pub points: [Vec<f64>; 2],
    /// `|x - z| + |y - z|` at the minimizers.
    pub min_sum: f64,
    /// True for the one-jump case (`y - x` in `Γ` or on its boundary).
    pub direct: bool,
    /// Candidate boundary intersections whose leg sum matches the minimum
    /// to within tolerance; 2 in every nondegenerate configuration.
    pub tied_candidates: usize,
}

impl MeetingSet {
    /// `(|x - z| ∨ |y - z|, |x - z| ∧ |y - z|)` for the first point; the
    /// second point gives the same pair.
    pub fn legs(&self, x: &[f64], y: &[f64]) -> (f64, f64) {
        if self.direct {
            return (norm(&sub(y, x)), 0.0);
        }
        let z = &self.points[0];
        let a = norm(&sub(x, z));
        let b = norm(&sub(y, z));
        (a.max(b), a.min(b))
    }
}

/// Computes `S(Γ, x, y)`.
///
/// When `y - x` is outside the closed cone, the minimizers lie in the
/// 2-plane through `x` spanned by the axis and `y - x`. Within that plane
/// the cone boundary is a pair of lines through the apex; the two lines
/// through `x` meet the non-parallel lines through `y` in exactly two
/// points, which are the minimizers.
pub fn meeting_points(cone: &SymmetricCone, x: &[f64], y: &[f64]) -> Result<MeetingSet> {
    let d = cone.dim();
    check_point(d, x)?;
    check_point(d, y)?;
    let w = sub(y, x);
    let len = norm(&w);
    if len == 0.0 {
        return Err(domain("meeting set is undefined for x = y"));
    }
    let axis = cone.axis().as_slice();
    let wa = dot(axis, &w);
    let cos_t = cone.aperture().cos();
    if wa.abs() / len >= cos_t - BOUNDARY_TOL {
        return Ok(MeetingSet {
            points: [x.to_vec(), y.to_vec()],
            min_sum: len,
            direct: true,
            tied_candidates: 2,
        });
    }
    // In-plane orthonormal frame (axis, eb) with w = wa * axis + wb * eb, wb > 0.
    let perp: Vec<f64> = w.iter().zip(axis).map(|(wi, ai)| wi - wa * ai).collect();
    let wb = norm(&perp);
    let eb: Vec<f64> = perp.iter().map(|p| p / wb).collect();
    let sin_t = cone.aperture().sin();
    let along = wa / cos_t;
    let across = wb / sin_t;
    // Boundary directions d± = cosθ·axis ± sinθ·eb.
    let point_on = |s: f64, sign: f64| -> Vec<f64> {
        (0..d)
            .map(|i| x[i] + s * (cos_t * axis[i] + sign * sin_t * eb[i]))
            .collect()
    };
    // x + s d+ = y + u d-  and  x + s' d- = y + u' d+.
    let s1 = 0.5 * (along + across);
    let u1 = 0.5 * (across - along);
    let s2 = 0.5 * (along - across);
    let u2 = -0.5 * (along + across);
    let z1 = point_on(s1, 1.0);
    let z2 = point_on(s2, -1.0);
    let sum1 = s1.abs() + u1.abs();
    let sum2 = s2.abs() + u2.abs();
    let min_sum = sum1.min(sum2);
    let tied = [sum1, sum2]
        .iter()
        .filter(|s| (*s - min_sum).abs() <= BOUNDARY_TOL * len)
        .count();
    Ok(MeetingSet {
        points: [z1, z2],
        min_sum,
        direct: false,
        tied_candidates: tied,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, SQRT_2};

    use super::*;

    fn cone2(angle: f64, aperture: f64) -> SymmetricCone {
        SymmetricCone::new(UnitVector::from_angle(angle), aperture).unwrap()
    }

    #[test]
    fn membership_examples() {
        let c = cone2(0.0, FRAC_PI_4);
        assert!(cone_contains(&c, &[1.0, 0.0]).unwrap());
        assert!(cone_contains(&c, &[-1.0, 0.0]).unwrap());
        assert!(!cone_contains(&c, &[0.0, 1.0]).unwrap());
        assert!(cone_contains(&c, &[0.0, 0.0]).is_err());
        let v = ConeUnion::new(2, vec![cone2(0.0, FRAC_PI_8), cone2(FRAC_PI_2, FRAC_PI_8)]).unwrap();
        assert!(union_contains(&v, &[0.0, 1.0]).unwrap());
        let v1 = ConeUnion::single(cone2(0.0, FRAC_PI_8));
        assert!(!union_contains(&v1, &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn boundary_is_excluded() {
        let c = cone2(0.0, FRAC_PI_4);
        // Exactly representable boundary direction of the θ = π/2 cone.
        let half = cone2(0.0, FRAC_PI_2);
        assert!(!cone_contains(&half, &[0.0, 3.0]).unwrap());
        assert!(cone_contains(&half, &[1e-6, 3.0]).unwrap());
        assert!(!cone_contains(&c, &[1.0, 1.0 + 1e-12]).unwrap());
    }

    #[test]
    fn invalid_inputs() {
        assert!(UnitVector::new(vec![1.0]).is_err());
        assert!(UnitVector::new(vec![0.0, 0.0]).is_err());
        assert!(SymmetricCone::new(UnitVector::from_angle(0.0), 0.0).is_err());
        assert!(SymmetricCone::new(UnitVector::from_angle(0.0), 1.6).is_err());
        assert!(ConeUnion::new(2, vec![]).is_err());
        let c3 = SymmetricCone::new(UnitVector::basis(3, 0).unwrap(), 0.3).unwrap();
        assert!(ConeUnion::new(2, vec![c3]).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(dist_to_cone(&cone2(0.0, FRAC_PI_4), &[2.0, 0.0]), 0.0);
        let c = cone2(FRAC_PI_2, FRAC_PI_4);
        assert!((dist_to_cone(&c, &[2.0, 0.0]) - SQRT_2).abs() < 1e-12);
        assert_eq!(dist_to_cone(&c, &[0.0, 0.0]), 0.0);
        // θ = π/2 covers everything up to a null set.
        assert_eq!(dist_to_cone(&cone2(0.3, FRAC_PI_2), &[-0.2, 5.0]), 0.0);
    }

    #[test]
    fn distance_matches_sampled_cone() {
        // Brute-force oracle: minimum distance to points on densely sampled
        // boundary rays (the closest point of a cone to an exterior point lies
        // on its boundary).
        let c = cone2(FRAC_PI_2, FRAC_PI_4);
        let w = [2.0, 0.0];
        let mut best = f64::INFINITY;
        for ray in [FRAC_PI_4, 3.0 * FRAC_PI_4, -FRAC_PI_4, -3.0 * FRAC_PI_4] {
            for k in 0..=200_000 {
                let r = k as f64 * 4.0 / 200_000.0;
                let p = [r * f64::cos(ray), r * f64::sin(ray)];
                best = best.min(norm(&sub(&w, &p)));
            }
        }
        assert!((best - SQRT_2).abs() < 1e-6);
        assert!((dist_to_cone(&c, &w) - best).abs() < 1e-6);
    }

    #[test]
    fn meeting_points_example() {
        let c = cone2(FRAC_PI_2, FRAC_PI_4);
        let s = meeting_points(&c, &[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert!(!s.direct);
        let mut pts = s.points.clone();
        pts.sort_by(|a, b| a[1].total_cmp(&b[1]));
        assert!((pts[0][0] - 1.0).abs() < 1e-12 && (pts[0][1] + 1.0).abs() < 1e-12);
        assert!((pts[1][0] - 1.0).abs() < 1e-12 && (pts[1][1] - 1.0).abs() < 1e-12);
        assert!((s.min_sum - 2.0 * SQRT_2).abs() < 1e-12);
        assert_eq!(s.tied_candidates, 2);
    }

    #[test]
    fn meeting_points_direct_and_degenerate() {
        let c = cone2(0.0, FRAC_PI_4);
        let s = meeting_points(&c, &[1.0, 1.0], &[3.0, 1.5]).unwrap();
        assert!(s.direct);
        assert_eq!(s.points, [vec![1.0, 1.0], vec![3.0, 1.5]]);
        // y - x on the boundary ray at angle π/4.
        let s = meeting_points(&c, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!(s.direct);
        assert!((s.min_sum - SQRT_2).abs() < 1e-15);
        assert!(meeting_points(&c, &[1.0, 2.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn nearest_cone_selector() {
        let v = ConeUnion::new(2, vec![cone2(0.0, 0.1), cone2(PI / 3.0, 0.1)]).unwrap();
        let (i, d) = v.nearest_cone(&[0.5, 1.0]);
        assert_eq!(i, 1);
        assert!((d - dist_to_union(&v, &[0.5, 1.0])).abs() == 0.0);
    }
}
