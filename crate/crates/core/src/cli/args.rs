//! Command line grammar.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{parse_ansatz, ExperimentConfig, GenerationSpec, Method};
use super::io::SUMMARY_SCHEMA;
use crate::error::{Error, Result};
use crate::movco::ExpectationMode;
use crate::qsim::Ansatz;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "MOVCO_THREADS";

/// Schema tag of a standalone config document.
pub const CONFIG_SCHEMA: &str = "movco.config/1";

#[derive(Debug, Parser)]
#[command(
    name = "movco",
    version,
    about = "Multi-objective variational optimization for cash management"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write random instance documents.
    Generate {
        #[arg(long = "cash-points", short = 'C')]
        cash_points: usize,
        #[arg(long, short = 'D')]
        days: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one method on every configured instance.
    Run {
        #[command(flatten)]
        experiment: ExperimentArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two methods on the same instances at evaluation budgets.
    Compare {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Method compared against the first one.
        #[arg(long = "baseline-method", value_enum, default_value = "penalty-vqe")]
        baseline_method: Method,
        /// Full config for the second method; overrides `--baseline-method`.
        #[arg(long = "baseline-config")]
        baseline_config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        budgets: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Penalized VQE over a grid of penalty weights.
    Sweep {
        #[command(flatten)]
        experiment: ExperimentArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Every [`ExperimentConfig`] field as an optional override of `--config`.
#[derive(Debug, Default, Args)]
pub struct ExperimentArgs {
    /// Config document or a previous summary to start from.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Instance document to solve.
    #[arg(long, conflicts_with_all = ["cash_points", "days"])]
    pub instance: Option<PathBuf>,
    /// Generate instances with this many cash points.
    #[arg(long = "cash-points", short = 'C', requires = "days")]
    pub cash_points: Option<usize>,
    #[arg(long, short = 'D', requires = "cash_points")]
    pub days: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long = "instance-seed", default_value_t = 0)]
    pub instance_seed: u64,
    /// `product`, `layered` or `layered:L`.
    #[arg(long, value_parser = parse_ansatz)]
    pub ansatz: Option<Ansatz>,
    #[arg(long)]
    pub shots: Option<usize>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub offspring: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long = "lambda-f")]
    pub lambda_f: Option<f64>,
    #[arg(long = "lambda-l")]
    pub lambda_l: Option<f64>,
    /// Sets both penalty weights.
    #[arg(long, conflicts_with_all = ["lambda_f", "lambda_l"])]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub parallel: Option<bool>,
    #[arg(long, value_enum)]
    pub expectation: Option<ExpectationArg>,
    #[arg(long = "statevector-limit")]
    pub statevector_limit: Option<usize>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum ExpectationArg {
    Exact,
    Sampled,
}

/// Loads the config embedded in a config or summary document.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let format = |m: String| Error::Format {
        path: path.to_path_buf(),
        message: m,
    };
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format(e.to_string()))?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(CONFIG_SCHEMA) | Some(SUMMARY_SCHEMA) => {}
        found => {
            return Err(Error::Schema {
                found: found.unwrap_or("<missing>").into(),
                expected: format!("{CONFIG_SCHEMA} or {SUMMARY_SCHEMA}"),
            })
        }
    }
    let config = value
        .get("config")
        .cloned()
        .ok_or_else(|| format("missing config".into()))?;
    serde_json::from_value(config).map_err(|e| format(e.to_string()))
}

impl ExperimentArgs {
    /// Applies the overrides to `--config` or the defaults.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => load_config(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(m) = self.method {
            c.method = m;
        }
        if let Some(p) = &self.instance {
            c.instance = Some(p.clone());
            c.generate = None;
        }
        if let (Some(cash_points), Some(days)) = (self.cash_points, self.days) {
            c.generate = Some(GenerationSpec {
                cash_points,
                days,
                count: self.count,
                seed: self.instance_seed,
            });
            c.instance = None;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(if let Some(v) = self.$field { c.$field = v; })*};
        }
        set!(
            ansatz,
            shots,
            population,
            offspring,
            generations,
            iterations,
            lambda_f,
            lambda_l,
            seed,
            parallel,
            statevector_limit
        );
        if let Some(l) = self.lambda {
            c.lambda_f = l;
            c.lambda_l = l;
        }
        if let Some(e) = self.expectation {
            c.expectation = match e {
                ExpectationArg::Exact => ExpectationMode::Exact,
                ExpectationArg::Sampled => ExpectationMode::Sampled,
            };
        }
        c.validate()?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_defaults() {
        let cli = Cli::try_parse_from([
            "movco", "run", "-C", "2", "-D", "4", "--count", "3", "--ansatz", "product",
            "--lambda", "50", "--out", "x",
        ])
        .unwrap();
        let Command::Run { experiment, .. } = cli.command else {
            panic!()
        };
        let c = experiment.resolve().unwrap();
        assert_eq!(c.ansatz, Ansatz::Product);
        assert_eq!((c.lambda_f, c.lambda_l), (50.0, 50.0));
        assert_eq!(c.generate.unwrap().count, 3);
    }

    #[test]
    fn days_require_cash_points() {
        assert!(Cli::try_parse_from(["movco", "run", "-D", "4", "--out", "x"]).is_err());
    }
}
