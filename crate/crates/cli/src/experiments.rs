use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use conekernel::geometry::{dist_to_union, meeting_points, ConeUnion, UnitVector};
use conekernel::levy::{density_grid, union_surface_measure, DensityOracle, Symbol, Window};
use conekernel::simulate::{
    estimate_density_with, estimate_exit_time, levy_system_check, simulate_levy_path, write_paths_csv, Directions,
    JumpSet, KdeOptions, PathConfig, SineModulation,
};
use conekernel::{hk_envelope, ModelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::*;
use crate::report::{EnvironmentStamp, ReportBuilder, VerificationReport};
use crate::HarnessError;

type Result<T> = std::result::Result<T, HarnessError>;

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Where artifacts go; `None` runs without writing anything.
struct Artifacts(Option<PathBuf>);

impl Artifacts {
    fn create(&self, name: &str) -> Result<Option<BufWriter<File>>> {
        let Some(dir) = &self.0 else { return Ok(None) };
        let path = dir.join(name);
        let file = File::create(&path).map_err(|source| HarnessError::Io { path, source })?;
        Ok(Some(BufWriter::new(file)))
    }

    fn io(&self, name: &str, e: std::io::Error) -> HarnessError {
        HarnessError::Io {
            path: self.0.clone().unwrap_or_default().join(name),
            source: e,
        }
    }

    /// CSV with a `#` schema line, a header row, then `rows`.
    fn csv<I: IntoIterator<Item = String>>(&self, name: &str, schema: &str, header: &str, rows: I) -> Result<()> {
        let Some(mut w) = self.create(name)? else { return Ok(()) };
        let write = || -> std::io::Result<()> {
            writeln!(w, "# {schema}")?;
            writeln!(w, "{header}")?;
            for r in rows {
                writeln!(w, "{r}")?;
            }
            w.flush()
        };
        write().map_err(|e| self.io(name, e))
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let Some(mut w) = self.create(name)? else { return Ok(()) };
        serde_json::to_writer_pretty(&mut w, value)
            .map_err(std::io::Error::other)
            .and_then(|_| w.flush())
            .map_err(|e| self.io(name, e))
    }

    fn with<F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>>(&self, name: &str, f: F) -> Result<()> {
        let Some(mut w) = self.create(name)? else { return Ok(()) };
        f(&mut w).and_then(|_| w.flush()).map_err(|e| self.io(name, e))
    }
}

/// Runs the configured experiment; when `out` is given, writes the config
/// snapshot, CSV artifacts and `report.json` there.
pub fn run_experiment(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<VerificationReport> {
    cfg.validate()?;
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let art = Artifacts(out.map(Path::to_path_buf));
    art.with("config.toml", |w| w.write_all(cfg.to_toml().as_bytes()))?;
    let v = cfg.model.union()?;
    let alpha = cfg.model.alpha;
    let mut rb = ReportBuilder::new();
    match &cfg.experiment {
        Experiment::Geom(p) => geom(p, &v, &mut rb, &art)?,
        Experiment::Phi(p) => phi(p, cfg.seed, &v, alpha, &mut rb, &art)?,
        Experiment::Density(p) => density(p, cfg.tol, &v, alpha, &mut rb, &art)?,
        Experiment::Simulate(p) => simulate(p, cfg.seed, cfg.tol, &v, alpha, &mut rb, &art)?,
        Experiment::VerifyEnvelope(p) => verify_envelope(p, cfg.tol, &v, &cfg.model.params()?, &mut rb, &art)?,
        Experiment::ExitTime(p) => exit_time(p, cfg.seed, &v, alpha, &mut rb, &art)?,
        Experiment::Green(p) => green(p, cfg.tol, &v, alpha, &mut rb, &art)?,
        Experiment::LevySystem(p) => levy_system(p, cfg.seed, &v, alpha, &mut rb)?,
    }
    let report = rb.finish(
        cfg.experiment.name(),
        EnvironmentStamp {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            config_hash: cfg.hash(),
        },
    );
    art.json("report.json", &report)?;
    Ok(report)
}

/// `q(t, 0, y) / hk_envelope(t, 0, y)` over three ray families, with decay
/// exponents fitted along the axis and the farthest-from-support ray.
pub fn run_verify_envelope(cfg: &ExperimentConfig) -> Result<VerificationReport> {
    if !matches!(cfg.experiment, Experiment::VerifyEnvelope(_)) {
        return Err(HarnessError::Config(
            "run_verify_envelope needs a verify-envelope config".into(),
        ));
    }
    run_experiment(cfg, None)
}

fn geom(p: &GeomParams, v: &ConeUnion, rb: &mut ReportBuilder, art: &Artifacts) -> Result<()> {
    let w: Vec<f64> = p.y.iter().zip(&p.x).map(|(a, b)| a - b).collect();
    let (nearest, dist) = v.nearest_cone(&w);
    let index = p.cone.unwrap_or(nearest);
    let cone = &v.cones()[index];
    let ms = meeting_points(cone, &p.x, &p.y)?;
    let d1: f64 = ms.points[0]
        .iter()
        .zip(&p.x)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let d2: f64 = ms.points[1]
        .iter()
        .zip(&p.y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let (long, short) = ms.legs(&p.x, &p.y);
    let span = w.iter().map(|c| c * c).sum::<f64>().sqrt();
    rb.measure("dist_to_union", dist);
    rb.measure("min_sum", ms.min_sum);
    rb.measure("cone_index", index as f64);
    rb.measure("tied_candidates", ms.tied_candidates as f64);
    rb.check(
        "leg-symmetry",
        (d1 - d2).abs() <= 1e-9 * (1.0 + d1),
        (d1 - d2).abs(),
        "<= 1e-9",
    );
    rb.check(
        "span-upper-bound",
        span <= 2.0 * long * (1.0 + 1e-12),
        span / long.max(f64::MIN_POSITIVE),
        "<= 2",
    );
    let single = conekernel::geometry::dist_to_cone(cone, &w);
    rb.check(
        "distance-below-short-leg",
        ms.direct || single <= short * (1.0 + 1e-9) + 1e-12,
        single - short,
        "<= 0",
    );
    let coords = |z: &[f64]| z.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    let header = (1..=p.x.len()).map(|i| format!("z{i}")).collect::<Vec<_>>().join(",");
    art.csv(
        "meeting_points.csv",
        "columns: point (index), z1..zd (meeting point coordinates)",
        &format!("point,{header}"),
        ms.points.iter().enumerate().map(|(i, z)| format!("{i},{}", coords(z))),
    )
}

fn phi(p: &PhiParams, seed: u64, v: &ConeUnion, alpha: f64, rb: &mut ReportBuilder, art: &Artifacts) -> Result<()> {
    let symbol = Symbol::new(v, alpha)?;
    let d = v.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let directions: Vec<Vec<f64>> = if d == 2 {
        (0..p.directions)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / p.directions as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()
    } else {
        (0..p.directions).map(|_| random_unit(d, &mut rng)).collect()
    };
    let values: Vec<f64> = directions.par_iter().map(|u| symbol.eval(u)).collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, 0f64), |(l, h), x| (l.min(*x), h.max(*x)));
    rb.measure("phi_min_unit", lo);
    rb.measure("phi_max_unit", hi);
    rb.measure("isotropy_spread", hi / lo - 1.0);
    let (bound, _) = symbol.lower_bound();
    rb.check("lower-bound-positive", bound > 0.0, bound, "> 0");

    let mut worst = 0f64;
    for _ in 0..p.homogeneity_samples {
        let xi: Vec<f64> = random_unit(d, &mut rng)
            .iter()
            .map(|c| c * rng.random_range(0.1..10.0))
            .collect();
        let r: f64 = rng.random_range(0.01..100.0);
        let scaled: Vec<f64> = xi.iter().map(|c| c * r).collect();
        let a = symbol.eval(&scaled);
        let b = r.powf(alpha) * symbol.eval(&xi);
        worst = worst.max((a - b).abs() / a);
    }
    rb.check(
        "homogeneity",
        worst < p.homogeneity_tol,
        worst,
        format!("< {:e}", p.homogeneity_tol),
    );

    let mut rows = Vec::new();
    for r in &p.radii {
        for (u, f) in directions.iter().zip(&values) {
            let coords = u.iter().map(|c| (c * r).to_string()).collect::<Vec<_>>().join(",");
            rows.push(format!("{coords},{}", f * r.powf(alpha)));
        }
    }
    let header = (1..=d).map(|i| format!("xi{i}")).collect::<Vec<_>>().join(",");
    art.csv(
        "phi.csv",
        "columns: xi1..xid (frequency), phi (characteristic exponent)",
        &format!("{header},phi"),
        rows,
    )
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let n = g.iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return g.into_iter().map(|c| c / n).collect();
        }
    }
}

fn density(
    p: &DensityParams,
    tol: Option<f64>,
    v: &ConeUnion,
    alpha: f64,
    rb: &mut ReportBuilder,
    art: &Artifacts,
) -> Result<()> {
    let mut worst_mass = 0f64;
    for &t in &p.times {
        let window = Window::centered(p.window_factor * t.powf(1.0 / alpha));
        let grid = density_grid(t, window, p.resolution, v, alpha)?;
        worst_mass = worst_mass.max((grid.mass() - 1.0).abs());
        rb.measure(format!("mass_t{t}"), grid.mass());
        rb.measure(format!("aliasing_estimate_t{t}"), grid.meta.aliasing_estimate);
        art.with(&format!("density_t{t}.csv"), |w| grid.write_csv(w))?;
        art.with(&format!("density_t{t}.meta.json"), |w| grid.write_meta(w))?;
    }
    rb.check(
        "grid-mass",
        worst_mass <= p.mass_tol,
        worst_mass,
        format!("<= {:e}", p.mass_tol),
    );

    let oracle = DensityOracle::new(v, alpha)?;
    let tol = tol.unwrap_or(1e-10);
    let scaled = p
        .diagonal_times
        .iter()
        .map(|&t| Ok(oracle.density(t, &[0.0, 0.0], tol)?.value * t.powf(2.0 / alpha)))
        .collect::<Result<Vec<f64>>>()?;
    let (lo, hi) = scaled
        .iter()
        .fold((f64::INFINITY, 0f64), |(l, h), x| (l.min(*x), h.max(*x)));
    for (t, s) in p.diagonal_times.iter().zip(&scaled) {
        rb.measure(format!("q_diag_scaled_t{t}"), *s);
    }
    let spread = hi / lo - 1.0;
    rb.check(
        "diagonal-self-similarity",
        spread <= p.diagonal_tol,
        spread,
        format!("<= {:e}", p.diagonal_tol),
    );
    art.csv(
        "diagonal.csv",
        "columns: t (time), q_scaled (q(t,0) * t^(2/alpha))",
        "t,q_scaled",
        p.diagonal_times.iter().zip(&scaled).map(|(t, s)| format!("{t},{s}")),
    )
}

fn simulate(
    p: &SimulateParams,
    seed: u64,
    tol: Option<f64>,
    v: &ConeUnion,
    alpha: f64,
    rb: &mut ReportBuilder,
    art: &Artifacts,
) -> Result<()> {
    let t = p.time;
    let scale = t.powf(1.0 / alpha);
    let probes = p.probes.clone().unwrap_or_else(|| {
        let mut out = Vec::new();
        for a in [-1.0, 0.0, 1.0] {
            for b in [-1.0, 0.0, 1.0] {
                out.push(vec![a * scale, b * scale]);
            }
        }
        out
    });
    let cfg = PathConfig::new(t, p.truncation_factor * scale)?
        .with_seed(seed)
        .with_policy(p.small_jump_policy);
    let origin = vec![0.0; v.dimension()];
    let opts = KdeOptions {
        bandwidth_factor: p.bandwidth_factor,
        ..KdeOptions::default()
    };
    let est = estimate_density_with(t, &origin, &probes, p.n_paths, &cfg, v, alpha, opts)?;
    rb.check(
        "estimator-sample-count",
        est.sample_count == p.n_paths,
        est.sample_count as f64,
        format!("== {}", p.n_paths),
    );

    let oracle = DensityOracle::new(v, alpha)?;
    let tol = tol.unwrap_or(1e-10);
    let floor = p.min_density_factor * t.powf(-2.0 / alpha);
    let mut worst = 0f64;
    let mut eligible = 0;
    let mut rows = Vec::new();
    for (k, y) in probes.iter().enumerate() {
        let q = oracle.density(t, y, tol)?.value;
        let (ph, se) = (est.point_estimates[k], est.standard_errors[k]);
        let rel = (ph - q).abs() / q;
        if q >= floor {
            eligible += 1;
            worst = worst.max(rel);
        }
        rows.push(format!("{},{},{q},{ph},{se},{rel}", y[0], y[1]));
    }
    rb.measure("eligible_probes", eligible as f64);
    rb.check(
        "mc-oracle-relative-error",
        eligible > 0 && worst < p.rel_tol,
        worst,
        format!("< {} on {eligible} probes", p.rel_tol),
    );
    art.csv(
        "density_estimates.csv",
        "columns: y1,y2 (probe), q (oracle density), estimate (KDE), std_error (batch means), rel_error",
        "y1,y2,q,estimate,std_error,rel_error",
        rows,
    )?;
    if p.write_paths > 0 && art.0.is_some() {
        let paths = (0..p.write_paths as u64)
            .map(|i| simulate_levy_path(&origin, &cfg, v, alpha, i))
            .collect::<conekernel::Result<Vec<_>>>()?;
        art.with("paths.csv", |w| write_paths_csv(w, &paths))?;
    }
    Ok(())
}

/// Unit direction in the plane maximizing `dist(u, V)`.
fn farthest_direction(v: &ConeUnion) -> Vec<f64> {
    let n = 7200;
    (0..n)
        .map(|k| {
            let a = std::f64::consts::PI * k as f64 / n as f64;
            vec![a.cos(), a.sin()]
        })
        .max_by(|a, b| dist_to_union(v, a).total_cmp(&dist_to_union(v, b)))
        .expect("nonempty scan")
}

fn verify_envelope(
    p: &EnvelopeParams,
    tol: Option<f64>,
    v: &ConeUnion,
    params: &ModelParams,
    rb: &mut ReportBuilder,
    art: &Artifacts,
) -> Result<()> {
    let alpha = params.alpha;
    let oracle = DensityOracle::new(v, alpha)?;
    let tol = tol.unwrap_or(1e-10);
    let cone = &v.cones()[0];
    let axis = cone.axis().as_slice().to_vec();
    let boundary = {
        let (s, c) = cone.aperture().sin_cos();
        vec![c * axis[0] - s * axis[1], s * axis[0] + c * axis[1]]
    };
    let far = farthest_direction(v);
    let families = [("axis", axis), ("boundary", boundary), ("farthest", far)];

    let mut probes = Vec::new();
    for &t in &p.times {
        let scale = t.powf(1.0 / alpha);
        for (name, u) in &families {
            for r in &p.radii {
                probes.push((t, *name, vec![u[0] * r * scale, u[1] * r * scale]));
            }
        }
    }
    let origin = [0.0, 0.0];
    let values = probes
        .par_iter()
        .map(|(t, _, y)| {
            let q = oracle.density(*t, y, tol)?.value;
            let e = hk_envelope(*t, &origin, y, v, params)?.value();
            Ok((q, e))
        })
        .collect::<conekernel::Result<Vec<_>>>()?;
    let ratios: Vec<f64> = values.iter().map(|(q, e)| q / e).collect();
    let finite = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0f64), |(l, h), x| (l.min(*x), h.max(*x)));
    rb.measure("ratio_min", lo);
    rb.measure("ratio_max", hi);
    rb.measure("probe_points_per_time", (families.len() * p.radii.len()) as f64);
    let spread = hi / lo;
    rb.check(
        "envelope-ratio-spread",
        finite && spread < p.spread_limit,
        spread,
        format!("finite and < {:e}", p.spread_limit),
    );

    let d = params.dimension as f64;
    let (a, b) = (p.fit_range[0], p.fit_range[1]);
    let radii: Vec<f64> = (0..p.fit_points)
        .map(|k| a * (b / a).powf(k as f64 / (p.fit_points - 1) as f64))
        .collect();
    let mut fits = Vec::new();
    for (name, u) in &families {
        let qs = radii
            .par_iter()
            .map(|r| Ok(oracle.density(p.fit_time, &[u[0] * r, u[1] * r], tol)?.value))
            .collect::<conekernel::Result<Vec<f64>>>()?;
        let slope = fit_loglog_slope(&radii, &qs);
        rb.measure(format!("decay_exponent_{name}"), slope);
        // Far-field reference: the local slope over [8b, 16b].
        let q1 = oracle
            .density(p.fit_time, &[u[0] * 8.0 * b, u[1] * 8.0 * b], tol)?
            .value;
        let q2 = oracle
            .density(p.fit_time, &[u[0] * 16.0 * b, u[1] * 16.0 * b], tol)?
            .value;
        rb.measure(format!("far_field_exponent_{name}"), (q2 / q1).ln() / 2f64.ln());
        fits.push((*name, slope));
    }
    let axis_target = -(d + alpha);
    let far_target = -(d + 2.0 * alpha);
    let axis_slope = fits[0].1;
    let far_slope = fits[2].1;
    rb.check(
        "axis-decay-exponent",
        (axis_slope - axis_target).abs() <= p.axis_exponent_tol,
        axis_slope,
        format!("{axis_target} ± {}", p.axis_exponent_tol),
    );
    rb.check(
        "farthest-decay-exponent",
        (far_slope - far_target).abs() <= p.far_exponent_tol,
        far_slope,
        format!("{far_target} ± {}", p.far_exponent_tol),
    );
    art.csv(
        "envelope_ratios.csv",
        "columns: t (time), family (ray), y1,y2 (point), q (oracle density), envelope, ratio (q/envelope)",
        "t,family,y1,y2,q,envelope,ratio",
        probes
            .iter()
            .zip(&values)
            .map(|((t, name, y), (q, e))| format!("{t},{name},{},{},{q},{e},{}", y[0], y[1], q / e)),
    )
}

fn exit_time(
    p: &ExitTimeParams,
    seed: u64,
    v: &ConeUnion,
    alpha: f64,
    rb: &mut ReportBuilder,
    art: &Artifacts,
) -> Result<()> {
    let sigma = union_surface_measure(v).total_mass;
    let auto_horizon = |r: f64| 10.0 * alpha * (2.0 * r).powf(alpha) / sigma;
    let origin = vec![0.0; v.dimension()];
    let r_max = p.radii.iter().copied().fold(0.0, f64::max);
    let horizon = p.horizon.unwrap_or_else(|| auto_horizon(r_max));

    let mut means = Vec::new();
    let mut rows = Vec::new();
    for (i, &r) in p.radii.iter().enumerate() {
        let delta = match p.truncation_mode {
            TruncationMode::Fixed => p.truncation,
            TruncationMode::Proportional => p.truncation * r,
        };
        let cfg = PathConfig::new(horizon, delta)?.with_seed(seed).with_stream(i as u64);
        let est = estimate_exit_time(&origin, r, p.n_paths, &cfg, v, alpha)?;
        let (m, se) = (est.mean.point_estimates[0], est.mean.standard_errors[0]);
        rb.measure(format!("mean_exit_r{r}"), m);
        rows.push(format!("{r},{delta},{m},{se},{}", est.unexited));
        means.push(m);
    }
    let slope = fit_loglog_slope(&p.radii, &means);
    rb.check(
        "exit-time-slope",
        (slope - alpha).abs() <= p.slope_tol,
        slope,
        format!("{alpha} ± {}", p.slope_tol),
    );
    art.csv(
        "exit_times.csv",
        "columns: r (radius), delta (truncation), mean_exit (E[tau ^ T]), std_error, unexited (paths censored at T)",
        "r,delta,mean_exit,std_error,unexited",
        rows,
    )?;

    // Scaling collapse: (r, t) against (2r, 2^α t), with δ ∝ r so that the
    // two truncated processes are exact rescalings of each other.
    let r0 = p.collapse_radius;
    let runs = [r0, 2.0 * r0]
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let cfg = PathConfig::new(auto_horizon(r), r / 20.0)?
                .with_seed(seed)
                .with_stream(1000 + i as u64);
            estimate_exit_time(&origin, r, p.n_paths, &cfg, v, alpha)
        })
        .collect::<conekernel::Result<Vec<_>>>()?;
    let m0 = runs[0].mean.point_estimates[0];
    let times: Vec<f64> = (0..p.collapse_points)
        .map(|k| 0.05 * m0 * 40f64.powf(k as f64 / (p.collapse_points.max(2) - 1) as f64))
        .collect();
    let scaled: Vec<f64> = times.iter().map(|t| t * 2f64.powf(alpha)).collect();
    let (pa, sa) = runs[0].exit_probability(&times);
    let (pb, sb) = runs[1].exit_probability(&scaled);
    let mut worst = 0f64;
    let mut rows = Vec::new();
    for k in 0..times.len() {
        let se = (sa[k] * sa[k] + sb[k] * sb[k]).sqrt();
        let z = if se > 0.0 {
            (pa[k] - pb[k]).abs() / se
        } else if pa[k] == pb[k] {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
        rows.push(format!(
            "{},{},{},{},{},{}",
            times[k], pa[k], sa[k], scaled[k], pb[k], sb[k]
        ));
    }
    rb.check(
        "survival-scaling-collapse",
        worst <= p.collapse_sigmas,
        worst,
        format!("<= {} standard errors", p.collapse_sigmas),
    );
    art.csv(
        "survival_collapse.csv",
        "columns: t (time for r), p_r (P(tau_r <= t)), se_r, t_scaled (2^alpha t), p_2r (P(tau_2r <= t_scaled)), se_2r",
        "t,p_r,se_r,t_scaled,p_2r,se_2r",
        rows,
    )
}

fn green(
    p: &GreenParams,
    tol: Option<f64>,
    v: &ConeUnion,
    alpha: f64,
    rb: &mut ReportBuilder,
    art: &Artifacts,
) -> Result<()> {
    let oracle = DensityOracle::new(v, alpha)?;
    let u = UnitVector::new(p.direction.clone()).map_err(HarnessError::config)?;
    let tol = tol.unwrap_or(1e-6);
    let values = p
        .distances
        .par_iter()
        .map(|r| {
            let y: Vec<f64> = u.as_slice().iter().map(|c| c * r).collect();
            Ok(oracle.green(&[0.0, 0.0], &y, tol)?.value)
        })
        .collect::<conekernel::Result<Vec<f64>>>()?;
    let slope = fit_loglog_slope(&p.distances, &values);
    let target = alpha - v.dimension() as f64;
    rb.check(
        "green-slope",
        (slope - target).abs() <= p.slope_tol,
        slope,
        format!("{target} ± {}", p.slope_tol),
    );
    art.csv(
        "green.csv",
        "columns: r (|x-y|), green (G(x,y) from the oracle)",
        "r,green",
        p.distances.iter().zip(&values).map(|(r, g)| format!("{r},{g}")),
    )
}

fn levy_system(p: &LevySystemParams, seed: u64, v: &ConeUnion, alpha: f64, rb: &mut ReportBuilder) -> Result<()> {
    let cfg = PathConfig::new(p.horizon, p.truncation)?.with_seed(seed);
    let plain = JumpSet {
        r_min: p.r_min,
        r_max: p.r_max,
        directions: Directions::Any,
    };
    let cmp = levy_system_check(&plain, &p.start, p.n_paths, &cfg, v, alpha, None)?;
    rb.measure("levy_jump_count", cmp.jump_count);
    rb.measure("levy_compensator", cmp.compensator);
    let z = (cmp.jump_count - cmp.compensator).abs() / cmp.difference_se;
    rb.check(
        "levy-system-unmodulated",
        cmp.agrees(p.sigmas),
        z,
        format!("<= {} standard errors", p.sigmas),
    );

    let sine = SineModulation::new(p.amplitude)?;
    let bounded = JumpSet {
        r_max: p.modulated_r_max,
        ..plain
    };
    let cfg = cfg.with_stream(1);
    let cmp = levy_system_check(&bounded, &p.start, p.n_paths, &cfg, v, alpha, Some(&sine))?;
    rb.measure("modulated_jump_count", cmp.jump_count);
    rb.measure("modulated_compensator", cmp.compensator);
    let z = (cmp.jump_count - cmp.compensator).abs() / cmp.difference_se;
    rb.check(
        "levy-system-modulated",
        cmp.agrees(p.sigmas),
        z,
        format!("<= {} standard errors", p.sigmas),
    );
    Ok(())
}
