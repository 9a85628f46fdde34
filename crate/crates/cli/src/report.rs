use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: String,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentStamp {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub experiment: String,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
    /// Reported quantities that are not pass/fail checks.
    pub measurements: BTreeMap<String, f64>,
    pub environment: EnvironmentStamp,
}

impl VerificationReport {
    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The report with all runtime fields zeroed, for determinism checks.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.checks.iter_mut().for_each(|c| c.runtime_seconds = 0.0);
        r
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<32} measured {:<14.6e} threshold {:<22} ({:.2}s)",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.threshold,
                c.runtime_seconds
            )?;
        }
        for (k, v) in &self.measurements {
            writeln!(f, "     {k:<32} {v:.6e}")?;
        }
        write!(
            f,
            "{}: {} ({} checks, config {})",
            self.experiment,
            if self.passed { "PASS" } else { "FAIL" },
            self.checks.len(),
            &self.environment.config_hash[..12]
        )
    }
}

/// Accumulates checks while an experiment runs.
pub(crate) struct ReportBuilder {
    checks: Vec<CheckRecord>,
    measurements: BTreeMap<String, f64>,
    clock: Instant,
}

impl ReportBuilder {
    pub fn new() -> Self {
        Self {
            checks: Vec::new(),
            measurements: BTreeMap::new(),
            clock: Instant::now(),
        }
    }

    /// Records a check; its runtime is the time since the previous one.
    pub fn check(&mut self, name: &str, passed: bool, measured: f64, threshold: impl Into<String>) {
        let now = Instant::now();
        let runtime = now.duration_since(self.clock).as_secs_f64();
        self.clock = now;
        self.checks.push(CheckRecord {
            name: name.to_string(),
            passed,
            measured,
            threshold: threshold.into(),
            runtime_seconds: runtime,
        });
    }

    pub fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measurements.insert(name.into(), value);
    }

    pub fn finish(self, experiment: &str, environment: EnvironmentStamp) -> VerificationReport {
        VerificationReport {
            experiment: experiment.to_string(),
            passed: self.checks.iter().all(|c| c.passed),
            checks: self.checks,
            measurements: self.measurements,
            environment,
        }
    }
}
