//! Ensemble experiments: how often does `P(alpha, N, [0, delta])` stray
//! from `delta` by more than a relative tolerance?

use std::io;

use serde::Serialize;
use thiserror::Error;

use crate::form::ReducedForm;
use crate::moduli::ModuliSample;
use crate::pairs::{pair_statistic, Interval};
use crate::par;
use crate::spectrum::{enumerate, Spectrum, SpectrumError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeviationError {
    #[error("gap scale {delta} outside [N^(-1+eta), 1] = [{lower}, 1]")]
    GapOutOfRange { delta: f64, lower: f64 },
    #[error("relative tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),
}

/// Scale range a `(N, delta)` pair falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `N^(-1+eta) <= delta <= N^(-eta)`: covered for generic and
    /// rectangular forms.
    Planck,
    /// `N^(-eta) < delta <= 1`: Poisson behaviour is only expected for rectangular forms.
    Macroscopic,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Planck => "planck",
            Regime::Macroscopic => "macroscopic",
        }
    }
}

/// Checks `delta` in `[N^(-1+eta), 1]` and reports the regime.
pub fn classify_gap(n: f64, delta: f64, eta: f64) -> Result<Regime, DeviationError> {
    let lower = n.powf(-1.0 + eta);
    if !(delta >= lower && delta <= 1.0) {
        return Err(DeviationError::GapOutOfRange { delta, lower });
    }
    Ok(if delta <= n.powf(-eta) {
        Regime::Planck
    } else {
        Regime::Macroscopic
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationRow {
    pub sample_id: usize,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub delta: f64,
    pub raw_pairs: Option<u64>,
    pub statistic: Option<f64>,
    pub rel_dev: Option<f64>,
    pub pass: bool,
    #[serde(skip)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub rows: Vec<DeviationRow>,
    /// Fraction of successful samples with `|P - delta| > tol * delta`.
    pub fraction: f64,
    pub failures: usize,
}

impl DeviationReport {
    /// Ratios `P / delta` of the successful samples, in sample order.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.statistic.map(|s| s / r.delta))
            .collect()
    }
}

pub fn deviation_experiment(
    samples: &[ModuliSample],
    n: f64,
    delta: f64,
    tol: f64,
) -> Result<DeviationReport, DeviationError> {
    deviation_experiment_with(samples, n, delta, tol, |form, n| enumerate(form, n))
}

/// As [`deviation_experiment`], with a caller-supplied spectrum source (for
/// example a cache). The source must return a spectrum with cutoff `>= n`.
pub fn deviation_experiment_with<F>(
    samples: &[ModuliSample],
    n: f64,
    delta: f64,
    tol: f64,
    spectrum_for: F,
) -> Result<DeviationReport, DeviationError>
where
    F: Fn(&ReducedForm, f64) -> Result<Spectrum, SpectrumError> + Sync + Send,
{
    if !(tol > 0.0 && tol < 1.0) {
        return Err(DeviationError::BadTolerance(tol));
    }
    let indexed: Vec<(usize, &ModuliSample)> = samples.iter().enumerate().collect();
    let rows = par::map_slice(&indexed, |&(i, s)| {
        let (a1, a2, a3) = s.form.coefficients();
        let mut row = DeviationRow {
            sample_id: i,
            a1,
            a2,
            a3,
            n,
            delta,
            raw_pairs: None,
            statistic: None,
            rel_dev: None,
            pass: false,
            error: None,
        };
        let report = spectrum_for(&s.form, n)
            .and_then(|spec| pair_statistic(&spec, n, Interval::closed(0.0, delta)));
        match report {
            Ok(r) => {
                let rel = (r.statistic - delta) / delta;
                row.raw_pairs = Some(r.raw_pairs);
                row.statistic = Some(r.statistic);
                row.rel_dev = Some(rel);
                row.pass = rel.abs() <= tol;
            }
            Err(e) => row.error = Some(e.to_string()),
        }
        row
    });
    let ok = rows.iter().filter(|r| r.error.is_none()).count();
    let deviating = rows
        .iter()
        .filter(|r| r.error.is_none() && !r.pass)
        .count();
    Ok(DeviationReport {
        fraction: if ok == 0 {
            0.0
        } else {
            deviating as f64 / ok as f64
        },
        failures: rows.len() - ok,
        rows,
    })
}

/// Writes rows as CSV with the fixed column order
/// `sample_id,a1,a2,a3,N,delta,raw_pairs,statistic,rel_dev,pass`.
/// Floats use the shortest representation that round-trips.
pub fn write_rows<W: io::Write>(rows: &[DeviationRow], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "sample_id,a1,a2,a3,N,delta,raw_pairs,statistic,rel_dev,pass"
    )?;
    let opt_f = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{:?},{:?},{:?},{:?},{:?},{},{},{},{}",
            r.sample_id,
            r.a1,
            r.a2,
            r.a3,
            r.n,
            r.delta,
            r.raw_pairs.map(|v| v.to_string()).unwrap_or_default(),
            opt_f(r.statistic),
            opt_f(r.rel_dev),
            r.pass
        )?;
    }
    Ok(())
}
