//! One-parameter sweeps over `ω`, `η`, `W` or `L`.

use super::config::ExperimentConfig;
use super::run::{run, RunOptions};
use crate::error::{LabError, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Omega,
    Eta,
    W,
    L,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Omega => "omega",
            Self::Eta => "eta",
            Self::W => "W",
            Self::L => "L",
        }
    }

    /// The config at `x`. `ω` moves both energies about their midpoint.
    pub fn apply(self, base: &ExperimentConfig, x: f64) -> Result<ExperimentConfig> {
        let mut c = base.clone();
        let whole = |x: f64| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as usize)
            } else {
                Err(LabError::Config(format!("{} must be a positive integer, got {x}", self.name())))
            }
        };
        match self {
            Self::Omega => {
                let e = 0.5 * (c.window.e1 + c.window.e2);
                c.window.e1 = e - 0.5 * x;
                c.window.e2 = e + 0.5 * x;
            }
            Self::Eta => {
                c.window.eta = Some(x);
                c.window.rho = None;
            }
            Self::W => c.geometry.w = whole(x)?,
            Self::L => c.geometry.l = whole(x)?,
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub x: f64,
    pub hash: Option<String>,
    pub error: Option<String>,
    pub mc_value: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub v_main: Option<f64>,
    pub ratio: Option<f64>,
    pub theta: Option<f64>,
    pub theta_asymptotic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub axis: Axis,
    pub points: Vec<SweepPoint>,
}

#[derive(Serialize)]
struct LongRow<'a> {
    axis: &'a str,
    x: f64,
    status: &'a str,
    quantity: &'a str,
    value: Option<f64>,
}

#[derive(Serialize)]
struct PlotRow {
    x: f64,
    mc_value: Option<f64>,
    mc_stderr: Option<f64>,
    v_main: Option<f64>,
    theta: Option<f64>,
}

impl SweepTable {
    /// Appends another table over the same axis.
    pub fn concat(mut self, other: SweepTable) -> Result<Self> {
        if self.axis != other.axis {
            return Err(LabError::Config("cannot concatenate sweeps over different axes".into()));
        }
        self.points.extend(other.points);
        Ok(self)
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }

    /// The long-format table: one row per `(x, quantity)`.
    pub fn write_long<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            let status = if p.error.is_some() { "failed" } else { "ok" };
            let cols = [
                ("mc_value", p.mc_value),
                ("mc_stderr", p.mc_stderr),
                ("v_main", p.v_main),
                ("ratio", p.ratio),
                ("theta", p.theta),
                ("theta_asymptotic", p.theta_asymptotic),
            ];
            for (quantity, value) in cols {
                w.serialize(LongRow { axis: self.axis.name(), x: p.x, status, quantity, value })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Plot data: `x, mc_value, mc_stderr, v_main, theta`.
    pub fn write_plot<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(PlotRow { x: p.x, mc_value: p.mc_value, mc_stderr: p.mc_stderr, v_main: p.v_main, theta: p.theta })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let stem = format!("sweep-{}", self.axis.name());
        self.write_long(std::fs::File::create(dir.join(format!("{stem}.csv")))?)?;
        self.write_plot(std::fs::File::create(dir.join(format!("{stem}-plot.csv")))?)?;
        std::fs::write(dir.join(format!("{stem}.json")), serde_json::to_vec_pretty(self)?)?;
        Ok(())
    }
}

fn point(base: &ExperimentConfig, root: &Path, axis: Axis, x: f64, opts: &RunOptions) -> SweepPoint {
    let mut p = SweepPoint {
        x,
        hash: None,
        error: None,
        mc_value: None,
        mc_stderr: None,
        v_main: None,
        ratio: None,
        theta: None,
        theta_asymptotic: None,
    };
    let outcome = axis.apply(base, x).and_then(|c| c.build(root)).and_then(|ex| {
        p.hash = Some(ex.hash.clone());
        run(&ex, opts)
    });
    match outcome {
        Ok(rec) => {
            if let Some(e) = rec.estimates {
                p.mc_value = Some(e.summary.normalized);
                p.mc_stderr = Some(e.summary.normalized_stderr);
            }
            if let Some(pr) = rec.predictions {
                p.v_main = Some(pr.v_main);
                p.ratio = Some(pr.ratio);
                p.theta = Some(pr.theta);
                p.theta_asymptotic = pr.theta_general;
            }
        }
        Err(e) => p.error = Some(e.to_string()),
    }
    p
}

/// One run per value, in parallel on at most `workers` threads shared with
/// the replicas inside each run. Failed points are recorded and skipped.
pub fn sweep(
    base: &ExperimentConfig,
    root: &Path,
    axis: Axis,
    values: &[f64],
    opts: &RunOptions,
    workers: usize,
) -> Result<SweepTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::Config(format!("thread pool: {e}")))?;
    let points = pool.install(|| values.par_iter().map(|&x| point(base, root, axis, x, opts)).collect());
    Ok(SweepTable { axis, points })
}

/// Least-squares slope of `log |y|` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y != 0.0).map(|(x, y)| (x.ln(), y.abs().ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let xs = [0.05, 0.1, 0.2, 0.4];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 1.5).abs() < 1e-12);
        assert_eq!(loglog_slope(&[1.0], &[1.0]), None);
    }

    #[test]
    fn integer_axes_reject_fractions() {
        let c = ExperimentConfig::parse(crate::harness::config::tests::SMOKE).unwrap();
        assert!(Axis::W.apply(&c, 2.5).is_err());
        assert_eq!(Axis::L.apply(&c, 128.0).unwrap().geometry.l, 128);
        let o = Axis::Omega.apply(&c, 0.4).unwrap();
        assert!((o.window.e2 - o.window.e1 - 0.4).abs() < 1e-15);
    }
}
