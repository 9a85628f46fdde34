use std::f64::consts::FRAC_PI_4;

use conekernel::geometry::{ConeUnion, SymmetricCone, UnitVector};
use conekernel::simulate::{estimate_density_with, simulate_levy_path, KdeOptions, PathConfig, SmallJumpPolicy};
use conekernel::{tail_mass, DensityOracle};

fn quarter_cone() -> ConeUnion {
    ConeUnion::single(SymmetricCone::new(UnitVector::from_angle(0.0), FRAC_PI_4).unwrap())
}

fn terminals(cfg: &PathConfig, n: u64) -> Vec<Vec<f64>> {
    let v = quarter_cone();
    (0..n)
        .map(|i| simulate_levy_path(&[0.0, 0.0], cfg, &v, 1.0, i).unwrap().terminal)
        .collect()
}

#[test]
fn paths_are_reproducible_and_streams_independent() {
    let v = quarter_cone();
    let cfg = PathConfig::new(2.0, 0.05).unwrap().with_seed(11).with_stream(4);
    let a = simulate_levy_path(&[1.0, -1.0], &cfg, &v, 0.8, 17).unwrap();
    let b = simulate_levy_path(&[1.0, -1.0], &cfg, &v, 0.8, 17).unwrap();
    assert_eq!(a, b);
    let other_path = simulate_levy_path(&[1.0, -1.0], &cfg, &v, 0.8, 18).unwrap();
    let other_stream = simulate_levy_path(&[1.0, -1.0], &cfg.clone().with_stream(5), &v, 0.8, 17).unwrap();
    assert_ne!(a.jump_times, other_path.jump_times);
    assert_ne!(a.jump_times, other_stream.jump_times);
}

#[test]
fn dropping_small_jumps_biases_towards_the_origin() {
    // E[min(|X_t|², 1)] grows as the truncation shrinks: the dropped jumps
    // carry variance ~ δ^{2-α}. Paths share random numbers across δ, so the
    // paired differences are resolved well beyond their noise.
    let n = 50_000;
    let stat = |x: &Vec<f64>| (x[0] * x[0] + x[1] * x[1]).min(1.0);
    let run = |delta: f64, policy: SmallJumpPolicy| -> Vec<f64> {
        let cfg = PathConfig::new(0.1, delta).unwrap().with_seed(3).with_policy(policy);
        terminals(&cfg, n).iter().map(stat).collect()
    };
    let drop: Vec<Vec<f64>> = [0.4, 0.1, 0.025]
        .iter()
        .map(|&d| run(d, SmallJumpPolicy::Drop))
        .collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    for pair in drop.windows(2) {
        let diffs: Vec<f64> = pair[1].iter().zip(&pair[0]).map(|(a, b)| a - b).collect();
        let m = mean(&diffs);
        let se = (diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (n * (n - 1)) as f64).sqrt();
        assert!(m > 3.0 * se, "increment {m} with SE {se}");
    }
    let reference = mean(&run(0.00625, SmallJumpPolicy::Drop));
    let matched = mean(&run(0.4, SmallJumpPolicy::GaussianMomentMatch));
    let coarse = mean(&drop[0]);
    assert!(
        (matched - reference).abs() < 0.5 * (coarse - reference).abs(),
        "{matched} {coarse} {reference}"
    );
}

#[test]
fn wide_histogram_keeps_its_mass() {
    let n = 20_000;
    let (t, half) = (1.0, 400.0);
    let cfg = PathConfig::new(t, 0.05).unwrap().with_seed(9);
    let xs = terminals(&cfg, n);
    let bins = 80;
    let width = 2.0 * half / bins as f64;
    let mut counts = vec![0usize; bins * bins];
    let mut escaped = 0;
    for x in &xs {
        let (i, j) = (((x[0] + half) / width).floor(), ((x[1] + half) / width).floor());
        if (0.0..bins as f64).contains(&i) && (0.0..bins as f64).contains(&j) {
            counts[i as usize * bins + j as usize] += 1;
        } else {
            escaped += 1;
        }
    }
    let density_mass: f64 = counts
        .iter()
        .map(|&c| c as f64 / (n as f64 * width * width))
        .sum::<f64>()
        * width
        * width;
    // Leaving the box needs, to first order, one jump longer than `half`.
    let escape = t * tail_mass(&quarter_cone(), 1.0, half).unwrap();
    assert!(
        (density_mass - (1.0 - escape)).abs() <= 0.01,
        "mass {density_mass}, escape {escape}"
    );
    let p = escaped as f64 / n as f64;
    let se = (escape * (1.0 - escape) / n as f64).sqrt();
    assert!((p - escape).abs() <= 4.0 * se + 0.002, "escaped {p} vs {escape}");
}

#[test]
fn density_estimates_are_positive_and_follow_the_cone() {
    let v = quarter_cone();
    let cfg = PathConfig::new(1.0, 0.05).unwrap().with_seed(21);
    let probes = vec![vec![0.0, 0.0], vec![6.0, 0.0], vec![0.0, 6.0]];
    let kde = KdeOptions {
        bandwidth_factor: 3.0,
        ..KdeOptions::default()
    };
    let est = estimate_density_with(1.0, &[0.0, 0.0], &probes, 50_000, &cfg, &v, 1.0, kde).unwrap();
    let again = estimate_density_with(1.0, &[0.0, 0.0], &probes, 50_000, &cfg, &v, 1.0, kde).unwrap();
    assert_eq!(est.point_estimates, again.point_estimates);
    assert!(est.point_estimates.iter().all(|p| *p > 0.0));
    assert!(est.standard_errors.iter().all(|s| *s > 0.0));
    // Mass spreads along the cone axis faster than across it.
    let oracle = DensityOracle::new(&v, 1.0).unwrap();
    let q: Vec<f64> = probes
        .iter()
        .map(|x| oracle.density(1.0, x, 1e-8).unwrap().value)
        .collect();
    assert!(q[1] > q[2]);
    assert!(est.point_estimates[1] > est.point_estimates[2] + 3.0 * est.standard_errors[1]);
    assert!(est.point_estimates[0] > est.point_estimates[1]);
}
