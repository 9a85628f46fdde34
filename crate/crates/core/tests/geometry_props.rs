use std::f64::consts::{FRAC_PI_2, PI};

use conekernel::geometry::{cone_contains, dist_to_cone, meeting_points, SymmetricCone, UnitVector};
use conekernel::{hk_envelope, hk_envelope_product, ConeUnion, ModelParams};
use proptest::prelude::*;

fn norm(w: &[f64]) -> f64 {
    w.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

fn planar_cone() -> impl Strategy<Value = SymmetricCone> {
    (0.0..PI, 0.05..FRAC_PI_2 - 0.05).prop_map(|(a, th)| SymmetricCone::new(UnitVector::from_angle(a), th).unwrap())
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn cone_distance_is_even_and_homogeneous(cone in planar_cone(), w in point(), s in -10.0..10.0f64) {
        let d = dist_to_cone(&cone, &w);
        let neg: Vec<f64> = w.iter().map(|c| -c).collect();
        prop_assert!((dist_to_cone(&cone, &neg) - d).abs() <= 1e-12 * (1.0 + d));
        let scaled: Vec<f64> = w.iter().map(|c| s * c).collect();
        prop_assert!((dist_to_cone(&cone, &scaled) - s.abs() * d).abs() <= 1e-12 * (1.0 + s.abs() * norm(&w)));
        prop_assert!(d <= norm(&w) + 1e-15);
        if cone_contains(&cone, &w).unwrap() {
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn meeting_sets_are_symmetric_and_translation_covariant(
        cone in planar_cone(), x in point(), y in point(), c in point()
    ) {
        let s = meeting_points(&cone, &x, &y).unwrap();
        let r = meeting_points(&cone, &y, &x).unwrap();
        prop_assert!((s.min_sum - r.min_sum).abs() <= 1e-10 * (1.0 + s.min_sum));
        prop_assert_eq!(s.direct, r.direct);

        let xs: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a + b).collect();
        let ys: Vec<f64> = y.iter().zip(&c).map(|(a, b)| a + b).collect();
        let t = meeting_points(&cone, &xs, &ys).unwrap();
        prop_assert!((t.min_sum - s.min_sum).abs() <= 1e-10 * (1.0 + s.min_sum));
        for (p, q) in s.points.iter().zip(&t.points) {
            let shifted: Vec<f64> = p.iter().zip(&c).map(|(a, b)| a + b).collect();
            prop_assert!(norm(&sub(&shifted, q)) <= 1e-9 * (1.0 + s.min_sum));
        }
    }

    #[test]
    fn meeting_sets_scale_with_the_points(cone in planar_cone(), x in point(), y in point(), lambda in 0.01..100.0f64) {
        let s = meeting_points(&cone, &x, &y).unwrap();
        let xl: Vec<f64> = x.iter().map(|c| lambda * c).collect();
        let yl: Vec<f64> = y.iter().map(|c| lambda * c).collect();
        let t = meeting_points(&cone, &xl, &yl).unwrap();
        prop_assert!((t.min_sum - lambda * s.min_sum).abs() <= 1e-10 * lambda * (1.0 + s.min_sum));
    }

    #[test]
    fn two_jump_routes_respect_the_triangle(cone in planar_cone(), x in point(), y in point()) {
        let w = sub(&y, &x);
        prop_assume!(norm(&w) > 1e-6);
        let s = meeting_points(&cone, &x, &y).unwrap();
        prop_assert_eq!(s.direct, cone_contains(&cone, &w).unwrap());
        if s.direct {
            prop_assert!((s.min_sum - norm(&w)).abs() <= 1e-12 * norm(&w));
            return Ok(());
        }
        let (long, short) = s.legs(&x, &y);
        // Both legs of both routes lie in the closed cone.
        for z in &s.points {
            for leg in [sub(z, &x), sub(&y, z)] {
                prop_assert!(dist_to_cone(&cone, &leg) <= 1e-9 * (1.0 + norm(&leg)));
            }
        }
        prop_assert!(s.min_sum >= norm(&w) * (1.0 - 1e-12));
        prop_assert!((long + short - s.min_sum).abs() <= 1e-9 * s.min_sum);
        // Equal legs across the two routes.
        let a = norm(&sub(&x, &s.points[0]));
        let b = norm(&sub(&y, &s.points[1]));
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        prop_assert!(norm(&w) <= 2.0 * long * (1.0 + 1e-12));
        // In the plane the short leg is exactly dist(y - x, Γ) / sin 2θ.
        let d = dist_to_cone(&cone, &w);
        let k = (2.0 * cone.aperture()).sin();
        prop_assert!((short * k - d).abs() <= 1e-9 * (1.0 + d), "short {short} k {k} dist {d}");
    }

    #[test]
    fn product_and_distance_envelopes_are_comparable(
        cone in planar_cone(), x in point(), y in point(), t in 0.01..10.0f64, alpha in 0.2..1.9f64
    ) {
        let params = ModelParams::new(alpha, 2, 1.0).unwrap();
        let v = ConeUnion::single(cone.clone());
        let a = hk_envelope(t, &x, &y, &v, &params).unwrap().value();
        let b = hk_envelope_product(t, &x, &y, &cone, &params).unwrap().value();
        let k = (2.0 * cone.aperture()).sin();
        // Legs sit within fixed factors of |y - x| and dist(y - x, Γ).
        let bound = (2.0 / k).powf(alpha + 2.0) * (1.0 / k).powf(alpha);
        prop_assert!(a > 0.0 && b > 0.0);
        prop_assert!(a / b <= bound * (1.0 + 1e-9) && b / a <= bound * (1.0 + 1e-9), "ratio {} bound {bound}", a / b);
    }
}

#[test]
fn half_plane_cones_reach_everything_directly() {
    let cone = SymmetricCone::new(UnitVector::from_angle(0.4), FRAC_PI_2).unwrap();
    for k in 0..16 {
        let a = k as f64 * PI / 8.0 + 0.01;
        let y = [a.cos(), a.sin()];
        let s = meeting_points(&cone, &[0.0, 0.0], &y).unwrap();
        assert!(s.direct || dist_to_cone(&cone, &y) < 1e-12);
    }
}
