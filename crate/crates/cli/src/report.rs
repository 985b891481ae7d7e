use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use serde_json::{json, Value};

use torusgaps::diophantine::DiophantineError;
use torusgaps::dirichlet::DirichletError;
use torusgaps::form::FormError;
use torusgaps::moduli::SampleError;
use torusgaps::smoothed::SmoothedError;
use torusgaps::spectrum::SpectrumError;
use torusgaps::window::WindowError;

pub const MANIFEST_SCHEMA: &str = "1";

/// Why a run stopped before producing a report.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Budget(String),
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Config(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "invalid configuration: {m}"),
            Failure::Budget(m) => write!(f, "resource budget exceeded: {m}"),
            Failure::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

pub fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<FormError> for Failure {
    fn from(e: FormError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<WindowError> for Failure {
    fn from(e: WindowError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<SampleError> for Failure {
    fn from(e: SampleError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<SpectrumError> for Failure {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::CutoffTooLarge { .. } => Failure::Budget(e.to_string()),
            SpectrumError::BadCutoff(_) | SpectrumError::CutoffExceedsSpectrum { .. } => {
                Failure::Config(e.to_string())
            }
            _ => Failure::Runtime(e.into()),
        }
    }
}

impl From<SmoothedError> for Failure {
    fn from(e: SmoothedError) -> Self {
        match e {
            SmoothedError::BudgetExceeded { .. } => Failure::Budget(e.to_string()),
            SmoothedError::BadParameters { .. } => Failure::Config(e.to_string()),
        }
    }
}

impl From<DiophantineError> for Failure {
    fn from(e: DiophantineError) -> Self {
        match e {
            DiophantineError::BudgetExceeded { .. }
            | DiophantineError::SieveBudgetExceeded(_)
            | DiophantineError::Overflow(_) => Failure::Budget(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<DirichletError> for Failure {
    fn from(e: DirichletError) -> Self {
        match e {
            DirichletError::BudgetExceeded { .. } | DirichletError::Overflow => {
                Failure::Budget(e.to_string())
            }
            DirichletError::Sieve(inner) => inner.into(),
            DirichletError::InvalidParameter(_) => Failure::Config(e.to_string()),
            DirichletError::QuadratureFailure(_) => Failure::Runtime(e.into()),
        }
    }
}

/// One measured quantity against its reference.
#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub experiment: String,
    pub parameters: String,
    pub measured: f64,
    pub reference: f64,
    pub rel_dev: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRow {
    /// Passes on exact equality.
    pub fn exact(experiment: &str, parameters: String, measured: f64, reference: f64) -> Self {
        CheckRow {
            experiment: experiment.into(),
            parameters,
            measured,
            reference,
            rel_dev: if reference != 0.0 {
                (measured - reference) / reference
            } else {
                measured - reference
            },
            tolerance: 0.0,
            pass: measured == reference,
        }
    }
}

/// Everything a subcommand hands back for writing.
#[derive(Debug, Default)]
pub struct Outcome {
    pub csv: Vec<u8>,
    pub rows: usize,
    pub failed_rows: usize,
    pub errors: Vec<String>,
    pub summary: Value,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failed_rows == 0 && self.errors.is_empty()
    }
}

/// Serializes rows with a header through the csv crate.
pub fn to_csv<R: Serialize>(rows: &[R]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)
}

pub fn check_outcome(rows: &[CheckRow]) -> anyhow::Result<Outcome> {
    Ok(Outcome {
        csv: to_csv(rows)?,
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| !r.pass).count(),
        ..Outcome::default()
    })
}

pub fn manifest_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

pub struct ManifestInfo<'a> {
    pub command: &'a str,
    pub config: Value,
    pub workers: usize,
    pub seconds: f64,
    pub cache: Value,
    pub warnings: Vec<String>,
}

pub fn write_outputs(out: &Path, outcome: &Outcome, info: ManifestInfo<'_>) -> anyhow::Result<()> {
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    fs::write(out, &outcome.csv).with_context(|| format!("writing {}", out.display()))?;
    let manifest = json!({
        "schema": MANIFEST_SCHEMA,
        "tool": "torusgaps",
        "version": env!("CARGO_PKG_VERSION"),
        "command": info.command,
        "config": info.config,
        "workers": info.workers,
        "report": out.display().to_string(),
        "rows": outcome.rows,
        "failed_rows": outcome.failed_rows,
        "passed": outcome.passed(),
        "errors": outcome.errors,
        "warnings": info.warnings,
        "cache": info.cache,
        "summary": outcome.summary,
        "timings": { "total_seconds": info.seconds },
    });
    let path = manifest_path(out);
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
