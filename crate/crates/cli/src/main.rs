use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use conekernel_cli::{run_experiment, Experiment, ExperimentConfig, HarnessError, VerificationReport};

#[derive(Parser)]
#[command(
    name = "conekernel",
    version,
    about = "Heat-kernel, Green-function and exit-time experiments for cone-supported jump kernels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Meeting points and cone distances for one pair of points.
    Geom(Common),
    /// Characteristic exponent over directions; homogeneity check.
    Phi(Common),
    /// Lattice density grids, their mass, and on-diagonal self-similarity.
    Density(Common),
    /// Monte Carlo density estimates compared with the Fourier oracle.
    Simulate(Common),
    /// Oracle density against the two-sided envelope.
    VerifyEnvelope(Common),
    /// Mean exit times from balls and survival-curve scaling.
    ExitTime(Common),
    /// Green function decay.
    Green(Common),
    /// Jump counts against their compensator.
    LevySystem(Common),
    /// Print a stored report and exit with its status.
    Report {
        /// Run directory or report.json path.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Run directory (config snapshot, CSVs, report.json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "CONEKERNEL_THREADS")]
    threads: Option<usize>,
    /// Quadrature tolerance for oracle evaluations.
    #[arg(long)]
    tol: Option<f64>,
}

fn load(kind: &str, common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.experiment.name() != kind {
                return Err(HarnessError::Config(format!(
                    "{} configures a {} experiment, not {kind}",
                    path.display(),
                    cfg.experiment.name()
                )));
            }
            cfg
        }
        None => ExperimentConfig::new(Experiment::default_for(kind).expect("subcommands name experiments")),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_dir = Some(out.clone());
    }
    if let Some(tol) = common.tol {
        cfg.tol = Some(tol);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(kind: &str, common: &Common) -> Result<VerificationReport, HarnessError> {
    let cfg = load(kind, common)?;
    let out = cfg
        .output_dir
        .clone()
        .unwrap_or_else(|| Path::new("runs").join(format!("{kind}-{}", &cfg.hash()[..12])));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(HarnessError::Config("--threads must be positive".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| HarnessError::Config(e.to_string()))?;
    let report = pool.install(|| run_experiment(&cfg, Some(&out)))?;
    println!("{report}");
    println!("artifacts: {}", out.display());
    Ok(report)
}

fn show(out: &Path) -> Result<VerificationReport, HarnessError> {
    let path = if out.is_dir() {
        out.join("report.json")
    } else {
        out.to_path_buf()
    };
    let text = std::fs::read_to_string(&path).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    let report: VerificationReport = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Config(format!("{} is not a report: {e}", path.display())))?;
    println!("{report}");
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Geom(c) => run("geom", c),
        Command::Phi(c) => run("phi", c),
        Command::Density(c) => run("density", c),
        Command::Simulate(c) => run("simulate", c),
        Command::VerifyEnvelope(c) => run("verify-envelope", c),
        Command::ExitTime(c) => run("exit-time", c),
        Command::Green(c) => run("green", c),
        Command::LevySystem(c) => run("levy-system", c),
        Command::Report { out } => show(out),
    };
    match result {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
