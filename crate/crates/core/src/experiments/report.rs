//! Experiment reports and their CSV/JSON encodings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "n,J,estimate,truth,rel_error,wce,t_kernel_s,t_weights_s,t_fss_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Ex1,
    Ex2,
    Ex3,
}

impl ExperimentId {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ex1 => "ex1",
            Self::Ex2 => "ex2",
            Self::Ex3 => "ex3",
        }
    }
}

impl std::str::FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex1" => Ok(Self::Ex1),
            "ex2" => Ok(Self::Ex2),
            "ex3" => Ok(Self::Ex3),
            other => Err(crate::error::invalid("experiment", format!("unknown id '{other}'"))),
        }
    }
}

/// One configuration of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// `fskq`, `kmc` or `mc`.
    pub method: String,
    pub dim: usize,
    pub n: usize,
    #[serde(rename = "J")]
    pub j: usize,
    pub estimate: f64,
    pub truth: f64,
    pub rel_error: f64,
    /// `None` for plain Monte Carlo.
    pub wce: Option<f64>,
    pub t_kernel_s: f64,
    pub t_weights_s: f64,
    pub t_fss_s: f64,
    pub kernel_evals: u64,
    pub length_scale: Option<f64>,
    pub seed: Option<u64>,
    pub level: Option<usize>,
    pub warning: Option<String>,
}

impl ReportRow {
    pub(crate) fn new(method: &str, dim: usize, n: usize, j: usize, estimate: f64, truth: f64) -> Self {
        Self {
            method: method.to_string(),
            dim,
            n,
            j,
            estimate,
            truth,
            rel_error: ((estimate - truth) / truth).abs(),
            wce: None,
            t_kernel_s: 0.0,
            t_weights_s: 0.0,
            t_fss_s: 0.0,
            kernel_evals: 0,
            length_scale: None,
            seed: None,
            level: None,
            warning: None,
        }
    }
}

/// A configuration that could not be run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFailure {
    pub label: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentId,
    /// Fully symmetric quadrature rows, sorted by `n`.
    pub rows: Vec<ReportRow>,
    /// Comparison methods (KMC, MC), sorted by `n`.
    pub baselines: Vec<ReportRow>,
    pub failures: Vec<RowFailure>,
    pub warnings: Vec<String>,
}

impl ExperimentReport {
    pub(crate) fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            rows: Vec::new(),
            baselines: Vec::new(),
            failures: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub(crate) fn finish(mut self) -> Self {
        self.rows.sort_by_key(|r| r.n);
        self.baselines.sort_by_key(|r| r.n);
        self
    }

    /// True when any row, failure or report-level warning was recorded.
    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
            || !self.failures.is_empty()
            || self.rows.iter().chain(&self.baselines).any(|r| r.warning.is_some())
    }

    /// CSV with the fixed header, one line per quadrature row.
    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }
}

pub fn rows_to_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let wce = r.wce.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.n, r.j, r.estimate, r.truth, r.rel_error, wce, r.t_kernel_s, r.t_weights_s, r.t_fss_s
        );
    }
    out
}
