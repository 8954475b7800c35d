//! One experiment: sample, estimate, predict, persist.
//!
//! Layout of a run directory `run-<hash>`:
//!
//! ```text
//! config.json       config with its hash, for replay
//! estimates.csv     Monte Carlo rows
//! predictions.json  every predicted quantity and truncation diagnostic
//! predictions.csv   predictions in the estimate schema
//! replicas/pairs.csv  per-replica (Y1, Y2)
//! record.json       the run record
//! log.txt           stage log, appended across reruns
//! FAILED            present only after a failed stage
//! ```

use super::config::Experiment;
use crate::error::{LabError, Result, StageExt};
use crate::estimator::{mc_covariance, replica_seed, CorrelationEstimate, CovarianceSummary, Method};
use mesoband::lattice::{MomentTensors, VarianceOperator};
use mesoband::predictor::{
    predict, theta_asymptotic, wigner_theta, DumbbellEngine, Form, PredictionReport, PredictionRequest, ThetaInputs,
};
use serde::{Deserialize, Serialize};
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Skip sampling and only predict.
    pub predict_only: bool,
    pub keep_replicas: bool,
}

impl RunOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self { out_dir: out_dir.into(), predict_only: false, keep_replicas: true }
    }
}

/// A row of `estimates.csv` or `predictions.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub quantity: String,
    pub d: usize,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "W")]
    pub w: usize,
    pub beta: u8,
    pub eta: f64,
    #[serde(rename = "E1")]
    pub e1: f64,
    #[serde(rename = "E2")]
    pub e2: f64,
    pub phi1: String,
    pub phi2: String,
    #[serde(rename = "R")]
    pub r: usize,
    pub value: f64,
    pub stderr: Option<f64>,
    pub method: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicaRow {
    pub replica: usize,
    pub seed: u64,
    pub y1: f64,
    pub y2: f64,
}

/// Serialisable view of a [`PredictionReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predictions {
    pub sites: usize,
    pub mass: f64,
    pub eta: f64,
    pub rho: f64,
    pub omega: f64,
    pub ey1: f64,
    pub ey2: f64,
    pub ey1_leading: f64,
    pub ey2_leading: f64,
    pub v_main: f64,
    pub v_main_tail: f64,
    pub v_main_order: usize,
    pub v_main_magnitude: f64,
    /// `(2/β) V_main / N²`.
    pub covariance: f64,
    /// `Cov / (EY_1 EY_2)` from `V_main`.
    pub ratio: f64,
    pub theta: f64,
    pub form: Option<String>,
    pub theta_general: Option<f64>,
    pub theta_step: Option<f64>,
    pub theta_general_at_step: Option<f64>,
    pub forms_consistent: Option<bool>,
    /// `theta_general / (LW)^d`, comparable with `ratio`.
    pub ratio_asymptotic: Option<f64>,
    pub wigner: Option<f64>,
    pub resolvent: Option<f64>,
    pub poisson: f64,
}

fn form_name(f: Form) -> &'static str {
    match f {
        Form::OmegaZero => "omega_zero",
        Form::OmegaLarge => "omega_large",
    }
}

impl Predictions {
    fn from_report(r: &PredictionReport, ex: &Experiment) -> Self {
        let g = &ex.geometry;
        let scale = ((g.side() * g.width()) as f64).powi(g.dim() as i32);
        let n = r.sites as f64;
        let general = r.asymptotic.map(|a| a.general);
        Self {
            sites: r.sites,
            mass: r.mass,
            eta: r.window.eta,
            rho: r.rho,
            omega: r.window.omega,
            ey1: r.ey.0,
            ey2: r.ey.1,
            ey1_leading: r.ey_leading.0,
            ey2_leading: r.ey_leading.1,
            v_main: r.v_main.value,
            v_main_tail: r.v_main.tail,
            v_main_order: r.v_main.order,
            v_main_magnitude: r.v_main.magnitude,
            covariance: 2.0 / r.beta.as_f64() * r.v_main.value / (n * n),
            ratio: r.ratio,
            theta: r.theta,
            form: r.form.map(|f| form_name(f).to_string()),
            theta_general: general,
            theta_step: r.asymptotic.map(|a| a.step),
            theta_general_at_step: r.asymptotic.map(|a| a.general_at_step),
            forms_consistent: r.asymptotic.and_then(|a| a.consistent),
            ratio_asymptotic: general.map(|t| t / scale),
            wigner: r.wigner,
            resolvent: r.resolvent,
            poisson: r.poisson,
        }
    }

    /// `(name, value)` for every available quantity.
    pub fn columns(&self) -> Vec<(&'static str, f64)> {
        let mut out = vec![
            ("v_main", self.v_main),
            ("v_main_tail", self.v_main_tail),
            ("covariance", self.covariance),
            ("ratio", self.ratio),
            ("theta", self.theta),
            ("ey1", self.ey1),
            ("ey2", self.ey2),
            ("poisson", self.poisson),
        ];
        let optional = [
            ("theta_general", self.theta_general),
            ("theta_step", self.theta_step),
            ("ratio_asymptotic", self.ratio_asymptotic),
            ("wigner", self.wigner),
            ("resolvent", self.resolvent),
        ];
        out.extend(optional.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub normalized: CorrelationEstimate,
    pub summary: CovarianceSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub os: String,
    pub arch: String,
    pub threads: usize,
}

impl Environment {
    fn current() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub config: super::config::ExperimentConfig,
    pub started: u64,
    pub finished: u64,
    pub eta: f64,
    pub rho: f64,
    pub replicas: Vec<ReplicaRow>,
    pub estimates: Option<Estimates>,
    pub predictions: Option<Predictions>,
    pub environment: Environment,
    pub directory: PathBuf,
}

impl RunRecord {
    pub fn load(dir: &Path) -> Result<Self> {
        let rec: Self = serde_json::from_slice(&fs::read(dir.join("record.json"))?)?;
        rec.verify()?;
        Ok(rec)
    }

    /// Checks that the hash matches the embedded config and that the replica
    /// count matches `R`.
    pub fn verify(&self) -> Result<()> {
        if self.config.hash()? != self.config_hash {
            return Err(LabError::format("run record", "config hash does not match the embedded config"));
        }
        if self.estimates.is_some() && self.replicas.len() != self.config.ensemble.replicas {
            return Err(LabError::format("run record", "replica count differs from R"));
        }
        Ok(())
    }

    pub fn table_rows(&self, ex_label: (&str, &str)) -> (Vec<TableRow>, Vec<TableRow>) {
        let c = &self.config;
        let row = |quantity: &str, r: usize, value: f64, stderr: Option<f64>, method: &str| TableRow {
            quantity: quantity.into(),
            d: c.geometry.d,
            l: c.geometry.l,
            w: c.geometry.w,
            beta: c.ensemble.beta,
            eta: self.eta,
            e1: c.window.e1.min(c.window.e2),
            e2: c.window.e1.max(c.window.e2),
            phi1: ex_label.0.into(),
            phi2: ex_label.1.into(),
            r,
            value,
            stderr,
            method: method.into(),
            seed: c.ensemble.seed,
        };
        let mut est = Vec::new();
        if let Some(e) = &self.estimates {
            let (s, m, r) = (&e.summary, e.normalized.method.label(), e.normalized.nsamples);
            est.push(row("normalized", r, s.normalized, Some(s.normalized_stderr), m));
            est.push(row("covariance", r, s.covariance, Some(s.covariance_stderr), m));
            est.push(row("mean1", r, s.mean1, Some(s.mean1_stderr), m));
            est.push(row("mean2", r, s.mean2, Some(s.mean2_stderr), m));
        }
        let pred = self
            .predictions
            .iter()
            .flat_map(|p| p.columns())
            .map(|(k, v)| row(k, 0, v, None, "predictor"))
            .collect();
        (est, pred)
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

struct Log(PathBuf);

impl Log {
    fn line(&self, msg: &str) {
        if let Ok(mut f) = OpenOptions::new().create(true).append(true).open(&self.0) {
            let _ = writeln!(f, "[{}] {msg}", now());
        }
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// The predictions for one experiment, without sampling.
pub fn predictions(ex: &Experiment) -> Result<Predictions> {
    let op = VarianceOperator::new(&ex.geometry)?;
    let moments = MomentTensors::new(&ex.geometry)?;
    let mut engine = DumbbellEngine::new(&op);
    let tau = ex.config.prediction.tau;
    let req = PredictionRequest {
        beta: ex.beta,
        window: &ex.window,
        phi1: &ex.phi1,
        phi2: &ex.phi2,
        params: &ex.params,
        budget: &ex.budget,
        moments: &moments,
        tau,
    };
    let mut report = predict(&mut engine, &req)?;
    if let Some(forced) = ex.form {
        report.form = forced;
        report.asymptotic = None;
        report.wigner = None;
        if let Some(f) = forced {
            let inputs = ThetaInputs {
                dim: ex.geometry.dim(),
                beta: ex.beta,
                window: &ex.window,
                phi1: &ex.phi1,
                phi2: &ex.phi2,
                moments: &moments,
                mass: ex.geometry.mass(),
                tau,
            };
            report.asymptotic = Some(theta_asymptotic(&inputs, f)?);
            report.wigner = Some(wigner_theta(ex.beta, &ex.window, &ex.phi1, &ex.phi2, f)?);
        }
    }
    Ok(Predictions::from_report(&report, ex))
}

/// The directory a run of `ex` uses under `root`.
pub fn run_dir(root: &Path, ex: &Experiment) -> PathBuf {
    root.join(format!("run-{}", ex.hash))
}

/// Runs every stage. A failing stage leaves its partial results and a
/// `FAILED` marker naming it, and the error names the stage.
pub fn run(ex: &Experiment, opts: &RunOptions) -> Result<RunRecord> {
    let dir = run_dir(&opts.out_dir, ex);
    fs::create_dir_all(dir.join("replicas"))?;
    let log = Log(dir.join("log.txt"));
    let previous = prepare(&dir, ex)?;
    log.line(&format!("start {} ({})", ex.hash, if previous.is_some() { "rerun" } else { "fresh" }));
    let mut record = RunRecord {
        config_hash: ex.hash.clone(),
        config: ex.config.clone(),
        started: now(),
        finished: 0,
        eta: ex.params.eta,
        rho: ex.params.rho,
        replicas: Vec::new(),
        estimates: None,
        predictions: None,
        environment: Environment::current(),
        directory: dir.clone(),
    };
    let outcome = stages(ex, opts, &dir, &log, &mut record, previous);
    record.finished = now();
    let persisted = persist(&dir, ex, &record);
    match outcome.and(persisted) {
        Ok(()) => {
            log.line("done");
            Ok(record)
        }
        Err(e) => {
            log.line(&format!("error: {e}"));
            let _ = fs::write(dir.join("FAILED"), format!("{e}\n"));
            Err(e)
        }
    }
}

/// Verifies a reused directory and returns its previous estimates CSV.
fn prepare(dir: &Path, ex: &Experiment) -> Result<Option<Vec<u8>>> {
    let cfg_path = dir.join("config.json");
    if !cfg_path.exists() {
        fs::write(&cfg_path, serde_json::to_vec_pretty(&ConfigFile { hash: ex.hash.clone(), config: ex.config.clone() })?)?;
        return Ok(None);
    }
    let stored: ConfigFile = serde_json::from_slice(&fs::read(&cfg_path)?).stage("load")?;
    if stored.hash != ex.hash || stored.config.hash()? != ex.hash {
        return Err(LabError::Stage {
            stage: "load",
            source: Box::new(LabError::Config(format!("{} holds a different config", dir.display()))),
        });
    }
    let failed = dir.join("FAILED");
    let clean = !failed.exists();
    let _ = fs::remove_file(failed);
    let est = dir.join("estimates.csv");
    Ok(if clean && est.exists() { Some(fs::read(est)?) } else { None })
}

#[derive(Serialize, Deserialize)]
struct ConfigFile {
    hash: String,
    config: super::config::ExperimentConfig,
}

fn stages(
    ex: &Experiment,
    opts: &RunOptions,
    dir: &Path,
    log: &Log,
    record: &mut RunRecord,
    previous: Option<Vec<u8>>,
) -> Result<()> {
    if !opts.predict_only {
        log.line(&format!("sample: R = {}, method = {}", ex.config.ensemble.replicas, ex.method.label()));
        let (est, summary, pairs) = mc_covariance(
            &ex.geometry,
            ex.beta,
            &ex.phi1,
            &ex.phi2,
            &ex.window,
            ex.config.ensemble.replicas,
            ex.config.ensemble.seed,
            &ex.method,
        )
        .stage("estimate")?;
        record.replicas = pairs
            .iter()
            .enumerate()
            .map(|(r, &(y1, y2))| ReplicaRow { replica: r, seed: replica_seed(ex.config.ensemble.seed, r), y1, y2 })
            .collect();
        record.estimates = Some(Estimates { normalized: est, summary });
        log.line("estimate: done");
        let labels = labels(ex);
        let (rows, _) = record.table_rows((&labels.0, &labels.1));
        write_csv(&dir.join("estimates.csv"), &rows).stage("persist")?;
        if opts.keep_replicas {
            write_csv(&dir.join("replicas").join("pairs.csv"), &record.replicas).stage("persist")?;
        }
        if let (Some(old), Method::ExactDiag) = (previous, ex.method) {
            if fs::read(dir.join("estimates.csv"))? != old {
                return Err(LabError::Stage {
                    stage: "estimate",
                    source: Box::new(LabError::Estimate("rerun changed estimates.csv".into())),
                });
            }
            log.line("estimate: identical to the previous run");
        }
    }
    if ex.config.prediction.enabled {
        log.line("predict: start");
        record.predictions = Some(predictions(ex).stage("predict")?);
        log.line("predict: done");
    }
    Ok(())
}

fn labels(ex: &Experiment) -> (String, String) {
    ex.window.order(ex.config.functions.phi1.label(), ex.config.functions.phi2.label())
}

fn persist(dir: &Path, ex: &Experiment, record: &RunRecord) -> Result<()> {
    let labels = labels(ex);
    let (est, pred) = record.table_rows((&labels.0, &labels.1));
    if !est.is_empty() {
        write_csv(&dir.join("estimates.csv"), &est).stage("persist")?;
    }
    if let Some(p) = &record.predictions {
        fs::write(dir.join("predictions.json"), serde_json::to_vec_pretty(p)?).stage("persist")?;
        write_csv(&dir.join("predictions.csv"), &pred).stage("persist")?;
    }
    fs::write(dir.join("record.json"), serde_json::to_vec_pretty(record)?).stage("persist")?;
    Ok(())
}
