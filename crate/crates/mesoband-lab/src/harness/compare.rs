//! z-scores of Monte Carlo estimates against predictions.

use super::run::RunRecord;
use crate::error::{LabError, Result};
use serde::{Deserialize, Serialize};

/// Threshold above which a comparison is flagged.
pub const Z_FLAG: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub name: String,
    pub mc: f64,
    pub stderr: f64,
    pub prediction: f64,
    pub z: f64,
    pub flagged: bool,
    /// Whether a flag here counts as a failed check; the Poisson row is a
    /// contrast and is expected to be flagged.
    pub acceptance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config_hash: String,
    pub rows: Vec<Comparison>,
}

impl Report {
    /// Whether any acceptance row is flagged.
    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.acceptance && r.flagged)
    }

    pub fn row(&self, name: &str) -> Option<&Comparison> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `(mc - prediction) / stderr`; zero when both sides coincide.
pub fn z_score(mc: f64, stderr: f64, prediction: f64) -> f64 {
    if mc == prediction {
        0.0
    } else {
        (mc - prediction) / stderr
    }
}

pub fn comparison(name: &str, mc: f64, stderr: f64, prediction: f64, acceptance: bool) -> Comparison {
    let z = z_score(mc, stderr, prediction);
    Comparison { name: name.into(), mc, stderr, prediction, z, flagged: !(z.abs() <= Z_FLAG), acceptance }
}

/// Compares the normalised covariance with the `V_main` prediction (using
/// the measured means), the resolvent form and the asymptotic `Θ` when
/// present, and the Poisson baseline.
pub fn compare(record: &RunRecord) -> Result<Report> {
    let est = record.estimates.as_ref().ok_or_else(|| LabError::format("run record", "no Monte Carlo estimates"))?;
    let pred = record.predictions.as_ref().ok_or_else(|| LabError::format("run record", "missing prediction columns"))?;
    let s = &est.summary;
    let beta = f64::from(record.config.ensemble.beta);
    let n = pred.sites as f64;
    let measured = |v: f64| 2.0 / beta * v / (n * n * s.mean1 * s.mean2);
    let mut rows = vec![comparison("v_main", s.normalized, s.normalized_stderr, measured(pred.v_main), true)];
    if let Some(v) = pred.resolvent {
        rows.push(comparison("resolvent", s.normalized, s.normalized_stderr, measured(v), false));
    }
    if let Some(r) = pred.ratio_asymptotic {
        rows.push(comparison("theta_asymptotic", s.normalized, s.normalized_stderr, r, false));
    }
    rows.push(comparison("poisson", s.normalized, s.normalized_stderr, pred.poisson, false));
    Ok(Report { config_hash: record.config_hash.clone(), rows })
}
