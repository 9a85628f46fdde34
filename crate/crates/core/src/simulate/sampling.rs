//! Direction and jump sampling for the truncated Lévy measure
//! `ν(dz) = 1_V(z) |z|^{-d-α} dz` restricted to `|z| > δ`.

use rand::Rng;

use crate::envelope::check_alpha;
use crate::error::{domain, Result};
use crate::geometry::{ConeUnion, UnitVector};
use crate::levy::{sample_in_union, second_moment_matrix, union_surface_measure};

/// Precomputed sampler for jumps longer than `delta`.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    v: ConeUnion,
    alpha: f64,
    delta: f64,
    cap_masses: Vec<f64>,
    cap_total: f64,
    sigma_total: f64,
}

impl JumpSampler {
    pub fn new(v: &ConeUnion, alpha: f64, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(domain(format!("truncation must be positive, got {delta}")));
        }
        let measure = union_surface_measure(v);
        let cap_total = measure.cap_masses.iter().sum();
        Ok(Self {
            v: v.clone(),
            alpha,
            delta,
            cap_masses: measure.cap_masses,
            cap_total,
            sigma_total: measure.total_mass,
        })
    }

    pub fn union(&self) -> &ConeUnion {
        &self.v
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Total jump rate `σ(V) δ^{-α} / α`.
    pub fn rate(&self) -> f64 {
        self.sigma_total * self.delta.powf(-self.alpha) / self.alpha
    }

    pub fn direction<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        sample_in_union(&self.v, &self.cap_masses, self.cap_total, rng)
    }

    pub fn radius<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // 1 - U lies in (0, 1], so the radius is finite and at least δ.
        let u = 1.0 - rng.random::<f64>();
        self.delta * u.powf(-1.0 / self.alpha)
    }

    pub fn jump<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let r = self.radius(rng);
        let mut z = self.direction(rng);
        z.iter_mut().for_each(|c| *c *= r);
        z
    }

    /// Covariance per unit time of the discarded jumps `|z| <= δ`:
    /// `δ^{2-α} / (2-α) · ∫ u uᵀ σ(du)`, row-major.
    pub fn small_jump_covariance(&self) -> Vec<f64> {
        let scale = self.delta.powf(2.0 - self.alpha) / (2.0 - self.alpha);
        second_moment_matrix(&self.v).into_iter().map(|m| m * scale).collect()
    }
}

/// One direction from the normalized surface measure on `V ∩ S^{d-1}`.
pub fn sample_direction<R: Rng + ?Sized>(v: &ConeUnion, rng: &mut R) -> UnitVector {
    let measure = union_surface_measure(v);
    let total = measure.cap_masses.iter().sum();
    let dir = sample_in_union(v, &measure.cap_masses, total, rng);
    UnitVector::new(dir).expect("sampled directions are unit vectors")
}

/// One jump `r·u` with `P(r > s) = (δ/s)^α` for `s >= δ`.
pub fn sample_jump<R: Rng + ?Sized>(v: &ConeUnion, alpha: f64, delta: f64, rng: &mut R) -> Result<Vec<f64>> {
    Ok(JumpSampler::new(v, alpha, delta)?.jump(rng))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    use super::*;
    use crate::geometry::{norm, SymmetricCone};

    fn cone(angle: f64, aperture: f64) -> SymmetricCone {
        SymmetricCone::new(UnitVector::from_angle(angle), aperture).unwrap()
    }

    #[test]
    fn planar_directions_are_uniform_on_the_double_arc() {
        let v = ConeUnion::single(cone(0.0, FRAC_PI_4));
        let sampler = JumpSampler::new(&v, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let bins = 40;
        let mut counts = vec![0usize; bins];
        let n = 1_000_000;
        for _ in 0..n {
            let u = sampler.direction(&mut rng);
            assert!(v.contains_raw(&u));
            // Fold both nappes onto [-π/4, π/4).
            let mut a = u[1].atan2(u[0]);
            if a > FRAC_PI_2 {
                a -= PI;
            } else if a < -FRAC_PI_2 {
                a += PI;
            }
            let k = (((a + FRAC_PI_4) / (2.0 * FRAC_PI_4)) * bins as f64) as usize;
            counts[k.min(bins - 1)] += 1;
        }
        let expected = n as f64 / bins as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        let p = 1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(chi2);
        assert!(p > 0.001, "chi2 {chi2}, p {p}");
    }

    #[test]
    fn disjoint_equal_caps_are_chosen_equally() {
        let v = ConeUnion::new(2, vec![cone(0.0, FRAC_PI_8), cone(PI / 2.0, FRAC_PI_8)]).unwrap();
        let sampler = JumpSampler::new(&v, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let first = (0..n)
            .filter(|_| v.cones()[0].contains_raw(&sampler.direction(&mut rng)))
            .count() as f64;
        let se = (n as f64 * 0.25).sqrt();
        assert!((first - n as f64 / 2.0).abs() < 3.0 * se, "{first}");
    }

    #[test]
    fn overlapping_caps_are_thinned_to_uniform() {
        // Caps [-π/4, π/4] and [0, π/2] (mod π) overlap on [0, π/4].
        let v = ConeUnion::new(2, vec![cone(0.0, FRAC_PI_4), cone(FRAC_PI_4, FRAC_PI_4)]).unwrap();
        let sampler = JumpSampler::new(&v, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 300_000;
        let overlap = (0..n)
            .filter(|_| v.multiplicity(&sampler.direction(&mut rng)) == 2)
            .count() as f64
            / n as f64;
        // Overlap is a third of the union [−π/4, π/2].
        assert!(
            (overlap - 1.0 / 3.0).abs() < 3.0 * (2.0 / 9.0 / n as f64).sqrt() + 1e-4,
            "{overlap}"
        );
    }

    #[test]
    fn radius_tail_exponent_by_hill_estimator() {
        let v = ConeUnion::single(cone(0.3, FRAC_PI_4));
        for alpha in [0.7, 1.4] {
            let sampler = JumpSampler::new(&v, alpha, 0.2).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let n = 1_000_000;
            let mut log_sum = 0.0;
            for _ in 0..n {
                let z = sampler.jump(&mut rng);
                let r = norm(&z);
                assert!(r >= 0.2);
                log_sum += (r / 0.2).ln();
            }
            // Hill estimator with the known threshold δ.
            let hill = n as f64 / log_sum;
            assert!((hill - alpha).abs() < 0.02, "alpha {alpha}: {hill}");
        }
    }

    #[test]
    fn unit_uniform_maps_to_truncation() {
        struct One;
        impl rand::RngCore for One {
            fn next_u32(&mut self) -> u32 {
                0
            }
            fn next_u64(&mut self) -> u64 {
                0
            }
            fn fill_bytes(&mut self, dst: &mut [u8]) {
                dst.fill(0);
            }
        }
        let v = ConeUnion::single(cone(0.0, FRAC_PI_4));
        let sampler = JumpSampler::new(&v, 1.3, 0.05).unwrap();
        assert_eq!(sampler.radius(&mut One), 0.05);
    }

    #[test]
    fn rate_is_the_tail_mass() {
        let v = ConeUnion::single(cone(0.0, FRAC_PI_4));
        let s = JumpSampler::new(&v, 1.0, 0.05).unwrap();
        assert!((s.rate() - PI / 0.05).abs() < 1e-9);
        assert!(JumpSampler::new(&v, 1.0, 0.0).is_err());
    }
}
