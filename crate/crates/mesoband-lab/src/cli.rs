//! The `mesoband` command line.

use crate::error::{LabError, Result};
use crate::harness::{
    audit::audit, compare, predictions, run, sweep, Axis, ExperimentConfig, RunOptions, RunRecord,
};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use toml::{Table, Value};

#[derive(Debug, Parser)]
#[command(name = "mesoband", version, about = "Density correlations of random band matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample, estimate and predict one configuration.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long)]
        no_replicas: bool,
    },
    /// Run a configuration over a list of values on one axis.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum)]
        axis: Axis,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Skip sampling.
        #[arg(long)]
        predict_only: bool,
    },
    /// z-scores of a finished run against its predictions.
    Compare {
        /// Run directory.
        run: PathBuf,
    },
    /// Predictions only, printed as JSON.
    Predict {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Resolvent and local-CLT bound audits.
    Audit {
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 256)]
        l: usize,
        #[arg(long, default_value_t = 8)]
        w: usize,
        #[arg(long, default_value_t = 20)]
        alphas: usize,
    },
}

/// Config keys as flags. Keys present in the file win over flags.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub w: Option<usize>,
    #[arg(long)]
    pub beta: Option<u8>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    #[arg(long)]
    pub e1: Option<f64>,
    #[arg(long)]
    pub e2: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// `cauchy`, `gaussian` or `bump`.
    #[arg(long)]
    pub phi1: Option<String>,
    #[arg(long)]
    pub phi2: Option<String>,
    /// `exact_diag` or `chebyshev`.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub probes: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
}

fn put(t: &mut Table, block: &str, key: &str, v: Option<Value>) {
    if let Some(v) = v {
        let entry = t.entry(block.to_string()).or_insert_with(|| Value::Table(Table::new()));
        if let Value::Table(b) = entry {
            b.insert(key.into(), v);
        }
    }
}

fn int<T: TryInto<i64>>(v: Option<T>) -> Result<Option<Value>> {
    v.map(|x| x.try_into().map(Value::Integer).map_err(|_| LabError::Config("flag value too large".into())))
        .transpose()
}

fn kind(name: Option<&String>) -> Option<Value> {
    name.map(|n| {
        let mut t = Table::new();
        t.insert("kind".into(), Value::String(n.clone()));
        Value::Table(t)
    })
}

impl ConfigArgs {
    /// The flags as a config table.
    pub fn table(&self) -> Result<Table> {
        let mut t = Table::new();
        put(&mut t, "geometry", "d", int(self.d)?);
        put(&mut t, "geometry", "l", int(self.l)?);
        put(&mut t, "geometry", "w", int(self.w)?);
        put(&mut t, "ensemble", "beta", int(self.beta)?);
        put(&mut t, "ensemble", "seed", int(self.seed)?);
        put(&mut t, "ensemble", "replicas", int(self.replicas)?);
        put(&mut t, "window", "e1", self.e1.map(Value::Float));
        put(&mut t, "window", "e2", self.e2.map(Value::Float));
        put(&mut t, "window", "eta", self.eta.map(Value::Float));
        put(&mut t, "window", "rho", self.rho.map(Value::Float));
        put(&mut t, "window", "kappa", self.kappa.map(Value::Float));
        put(&mut t, "functions", "phi1", kind(self.phi1.as_ref()));
        put(&mut t, "functions", "phi2", kind(self.phi2.as_ref()));
        put(&mut t, "method", "kind", self.method.clone().map(Value::String));
        put(&mut t, "method", "n_max", int(self.n_max)?);
        put(&mut t, "method", "probes", int(self.probes)?);
        put(&mut t, "prediction", "tau", self.tau.map(Value::Float));
        Ok(t)
    }

    /// The merged config and the directory relative paths resolve against.
    pub fn load(&self) -> Result<(ExperimentConfig, PathBuf)> {
        let mut merged = self.table()?;
        let base = match &self.config {
            Some(path) => {
                let file: Table = toml::from_str(&std::fs::read_to_string(path)?)?;
                merge(&mut merged, file);
                path.parent().map(Path::to_path_buf).unwrap_or_default()
            }
            None => PathBuf::from("."),
        };
        Ok((ExperimentConfig::parse(&toml::to_string(&merged)?)?, base))
    }
}

/// Deep merge; values in `over` replace those in `base`.
pub fn merge(base: &mut Table, over: Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run { config, out, no_replicas } => {
            let (cfg, base) = config.load()?;
            let ex = cfg.build(&base)?;
            let mut opts = RunOptions::new(out);
            opts.keep_replicas = !no_replicas;
            let rec = run(&ex, &opts)?;
            println!("{}", rec.directory.display());
            if rec.estimates.is_some() && rec.predictions.is_some() {
                let report = compare(&rec)?;
                print_report(&report);
                return Ok(i32::from(report.failed()));
            }
            Ok(0)
        }
        Command::Sweep { config, axis, values, out, workers, predict_only } => {
            let (cfg, base) = config.load()?;
            let mut opts = RunOptions::new(&out);
            opts.predict_only = predict_only;
            let table = sweep(&cfg, &base, axis, &values, &opts, workers)?;
            table.write_dir(&out)?;
            table.write_plot(std::io::stdout())?;
            for p in table.points.iter().filter(|p| p.error.is_some()) {
                eprintln!("x = {}: {}", p.x, p.error.as_deref().unwrap_or(""));
            }
            Ok(i32::from(table.failures() > 0))
        }
        Command::Compare { run } => {
            let rec = RunRecord::load(&run)?;
            let report = compare(&rec)?;
            report.write_csv(std::fs::File::create(run.join("compare.csv"))?)?;
            print_report(&report);
            Ok(i32::from(report.failed()))
        }
        Command::Predict { config } => {
            let (cfg, base) = config.load()?;
            let ex = cfg.build(&base)?;
            println!("{}", serde_json::to_string_pretty(&predictions(&ex)?)?);
            Ok(0)
        }
        Command::Audit { d, l, w, alphas } => {
            let r = audit(d, l, w, alphas)?;
            println!("alpha_re,alpha_im,inverse_norm,inverse_constant,max_entry,entry_constant");
            for a in &r.alphas {
                println!(
                    "{},{},{},{},{},{}",
                    a.alpha.re, a.alpha.im, a.inverse_norm, a.inverse_constant, a.max_entry, a.entry_constant
                );
            }
            println!("# lclt_constant = {} at b = {}", r.lclt_constant, r.lclt_power);
            println!("# spectral_margin = {}, spectral_gap = {}", r.spectral_margin, r.spectral_gap);
            Ok(0)
        }
    }
}

fn print_report(r: &crate::harness::Report) {
    println!("{:<18} {:>14} {:>14} {:>10} {:>8}", "prediction", "value", "mc", "z", "flag");
    for c in &r.rows {
        let flag = if c.flagged { "|z|>3" } else { "" };
        println!("{:<18} {:>14.6e} {:>14.6e} {:>10.3} {:>8}", c.name, c.prediction, c.mc, c.z, flag);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_wins_over_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "[geometry]\nl = 64\nw = 4\n\n[window]\ne1 = 0.0\ne2 = 0.1\n").unwrap();
        let args = ConfigArgs {
            config: Some(path),
            d: Some(1),
            l: Some(128),
            beta: Some(2),
            seed: Some(1),
            replicas: Some(16),
            eta: Some(0.2),
            phi1: Some("cauchy".into()),
            phi2: Some("gaussian".into()),
            ..Default::default()
        };
        let (cfg, base) = args.load().unwrap();
        assert_eq!(cfg.geometry.l, 64);
        assert_eq!(cfg.geometry.d, 1);
        assert_eq!(cfg.window.eta, Some(0.2));
        assert_eq!(base, dir.path());
    }

    #[test]
    fn parses_subcommands() {
        let cli = Cli::try_parse_from(["mesoband", "sweep", "--axis", "omega", "--values", "0.1,0.2"]).unwrap();
        assert!(matches!(cli.command, Command::Sweep { ref values, .. } if values.len() == 2));
        assert!(Cli::try_parse_from(["mesoband", "sweep", "--axis", "spin", "--values", "1"]).is_err());
    }
}
