//! Run configuration: defaults, optional JSON file, command-line flags, in
//! increasing precedence.

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use nonoverlap::functional::parse_functional;
use nonoverlap::{FunctionalSpec, ProblemConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Verify,
    Trace,
    Sample,
    All,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: Mode,
    pub functional: String,
    pub r: f64,
    pub rho: f64,
    pub alpha_steps: usize,
    pub solver_tol: f64,
    pub closure_tol: f64,
    pub oracle_tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::All,
            functional: "w1/w3".into(),
            r: 0.5,
            rho: 2.0,
            alpha_steps: 360,
            solver_tol: 1e-10,
            closure_tol: 1e-6,
            oracle_tol: 1e-8,
            seed: 1,
            samples: 10_000,
            out_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// Checks every field and returns the parsed functional and problem.
    pub fn validate(&self) -> Result<(FunctionalSpec, ProblemConfig), CliError> {
        let cfg = ProblemConfig::new(self.r, self.rho).map_err(|e| CliError::Config(e.to_string()))?;
        let spec = parse_functional(&self.functional)
            .map_err(|e| CliError::Config(format!("functional {:?}: {e}", self.functional)))?;
        if self.alpha_steps < 8 {
            return Err(CliError::Config(format!(
                "alpha-steps must be at least 8, got {}",
                self.alpha_steps
            )));
        }
        for (name, v) in [
            ("solver-tol", self.solver_tol),
            ("closure-tol", self.closure_tol),
            ("oracle-tol", self.oracle_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        Ok((spec, cfg))
    }

    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Default, Parser)]
#[command(name = "nonoverlap", version, about = "Trace the boundary of a functional's value range over nonoverlapping univalent pairs")]
pub struct Cli {
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Rational functional in w1..w4, e.g. "w1/w3".
    #[arg(long)]
    pub functional: Option<String>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha_steps: Option<usize>,
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub closure_tol: Option<f64>,
    #[arg(long)]
    pub oracle_tol: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Cli {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.mode {
            c.mode = v;
        }
        if let Some(v) = &self.functional {
            c.functional = v.clone();
        }
        if let Some(v) = self.r {
            c.r = v;
        }
        if let Some(v) = self.rho {
            c.rho = v;
        }
        if let Some(v) = self.alpha_steps {
            c.alpha_steps = v;
        }
        if let Some(v) = self.solver_tol {
            c.solver_tol = v;
        }
        if let Some(v) = self.closure_tol {
            c.closure_tol = v;
        }
        if let Some(v) = self.oracle_tol {
            c.oracle_tol = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.samples {
            c.samples = v;
        }
        if let Some(v) = &self.out_dir {
            c.out_dir = v.clone();
        }
        c.validate()?;
        Ok(c)
    }
}
