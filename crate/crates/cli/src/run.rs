//! Executes one configured run and writes its artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nonoverlap::oracle::{run_verification, VerificationReport, VerifyOptions};
use nonoverlap::report::{cloud_csv, to_json, trace_csv};
use nonoverlap::sampler::{sample_cloud, CloudPoint};
use nonoverlap::tracer::{contains, trace_curve};
use nonoverlap::{
    Complex64, Containment, FunctionalSpec, ProblemConfig, TraceError, TraceOptions, TraceResult,
};
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::svg::emit_svg;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub status: TraceStatus,
    pub points: usize,
    pub failures: usize,
    pub closed: bool,
    pub closure_defect: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceStatus {
    Complete,
    Aborted,
}

/// Printed on standard output after a successful run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub verification: Option<VerifySummary>,
    pub trace: Option<TraceSummary>,
    pub samples: Option<usize>,
}

#[derive(Serialize)]
struct TraceArtifact<'a> {
    status: TraceStatus,
    #[serde(flatten)]
    trace: &'a TraceResult,
}

#[derive(Serialize)]
#[serde(untagged)]
enum ContainmentArtifact {
    Counts {
        samples: usize,
        counts: BTreeMap<&'static str, usize>,
    },
    Unavailable {
        status: &'static str,
    },
}

struct Writer {
    dir: PathBuf,
    written: Vec<String>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(name.to_string());
        Ok(())
    }
}

pub fn trace_options(config: &RunConfig) -> TraceOptions {
    let mut opts = TraceOptions {
        steps: config.alpha_steps,
        closure_tolerance: config.closure_tol,
        ..TraceOptions::default()
    };
    opts.solver.tolerance = config.solver_tol;
    opts.solver.acceptance = opts.solver.acceptance.max(config.solver_tol);
    opts
}

pub fn verify_options(config: &RunConfig) -> VerifyOptions {
    VerifyOptions {
        seed: config.seed,
        tolerance: config.oracle_tol,
        ..VerifyOptions::default()
    }
}

fn verify(cfg: &ProblemConfig, config: &RunConfig, out: &mut Writer) -> Result<VerificationReport, CliError> {
    let report = run_verification(cfg, &verify_options(config));
    out.put("verification.json", &to_json(&report))?;
    Ok(report)
}

/// Traces the curve; an aborted trace still yields its partial result.
fn trace(
    spec: &FunctionalSpec,
    cfg: &ProblemConfig,
    config: &RunConfig,
) -> Result<(TraceStatus, TraceResult), CliError> {
    match trace_curve(spec, cfg, &trace_options(config)) {
        Ok(t) => Ok((TraceStatus::Complete, t)),
        Err(TraceError::Aborted { partial, .. }) => Ok((TraceStatus::Aborted, *partial)),
        Err(TraceError::Options(m)) => Err(CliError::Config(m)),
        Err(e) => Err(CliError::Internal(e.to_string())),
    }
}

fn write_trace(
    status: TraceStatus,
    t: &TraceResult,
    cloud: Option<&[Complex64]>,
    out: &mut Writer,
) -> Result<(), CliError> {
    out.put("trace.csv", &trace_csv(t))?;
    out.put("trace.json", &to_json(&TraceArtifact { status, trace: t }))?;
    out.put("trace.svg", &emit_svg(t, cloud))
}

fn containment(t: &TraceResult, cloud: &[CloudPoint]) -> ContainmentArtifact {
    if !t.closed {
        return ContainmentArtifact::Unavailable {
            status: "not available: trace not closed",
        };
    }
    let mut counts = BTreeMap::from([("inside", 0), ("outside", 0), ("near-boundary", 0)]);
    for c in cloud {
        let key = match contains(t, c.value) {
            Ok(Containment::Inside) => "inside",
            Ok(Containment::Outside) => "outside",
            Ok(Containment::NearBoundary) | Err(_) => "near-boundary",
        };
        *counts.get_mut(key).expect("key present") += 1;
    }
    ContainmentArtifact::Counts {
        samples: cloud.len(),
        counts,
    }
}

/// Runs `config` and writes artifacts into its output directory. Artifacts
/// are written before any trace-abort or oracle error is returned.
pub fn run(config: &RunConfig) -> Result<RunSummary, CliError> {
    let (spec, cfg) = config.validate()?;
    let mut out = Writer::new(&config.out_dir)?;
    out.put("config.json", &to_json(config))?;
    let mut summary = RunSummary {
        mode: config.mode,
        out_dir: config.out_dir.clone(),
        artifacts: Vec::new(),
        verification: None,
        trace: None,
        samples: None,
    };
    let mut abort: Option<CliError> = None;
    let mut oracle: Option<CliError> = None;

    if matches!(config.mode, Mode::Verify | Mode::All) {
        let report = verify(&cfg, config, &mut out)?;
        let passed = report.checks.iter().filter(|c| c.passed).count();
        let total = report.checks.len();
        if passed < total {
            oracle = Some(CliError::Oracle {
                failed: total - passed,
                total,
            });
        }
        summary.verification = Some(VerifySummary { passed, total });
    }

    let cloud = if matches!(config.mode, Mode::Sample | Mode::All) {
        let cloud = sample_cloud(&spec, &cfg, config.samples, config.seed)
            .map_err(|e| CliError::Internal(e.to_string()))?;
        out.put("cloud.csv", &cloud_csv(&cloud))?;
        summary.samples = Some(cloud.len());
        Some(cloud)
    } else {
        None
    };

    if matches!(config.mode, Mode::Trace | Mode::All) {
        let (status, t) = trace(&spec, &cfg, config)?;
        let values: Option<Vec<Complex64>> = cloud.as_ref().map(|c| c.iter().map(|p| p.value).collect());
        write_trace(status, &t, values.as_deref(), &mut out)?;
        if let Some(cloud) = &cloud {
            out.put("containment.json", &to_json(&containment(&t, cloud)))?;
        }
        if status == TraceStatus::Aborted {
            abort = Some(CliError::TraceAbort {
                failed: t.failures.len(),
                total: t.steps,
            });
        }
        summary.trace = Some(TraceSummary {
            status,
            points: t.points.len(),
            failures: t.failures.len(),
            closed: t.closed,
            closure_defect: t.closure_defect,
        });
    }

    summary.artifacts = out.written;
    match abort.or(oracle) {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}
