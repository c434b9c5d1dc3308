//! Experiment harness: instance generation, single runs, method comparisons
//! and penalty sweeps, all writing versioned, reproducible result files.

pub mod args;
pub mod commands;
pub mod config;
pub mod io;

pub use args::{load_config, Cli, Command, ExperimentArgs, CONFIG_SCHEMA, THREADS_ENV};
pub use commands::{
    cmd_compare, cmd_generate, cmd_run, cmd_sweep, evaluate_run, generated_instance,
    resolve_instances, run_seed, ComparisonAggregate, ComparisonDocument, ComparisonRow,
    SweepDocument, RATIO_THRESHOLDS,
};
pub use config::{format_ansatz, parse_ansatz, ExperimentConfig, GenerationSpec, Method};
pub use io::{read_instance, read_trace, write_instance, SummaryDocument, TraceRow};

use crate::error::Result;

/// Executes a parsed command line and returns a one-line report per file set.
pub fn execute(cli: &Cli) -> Result<Vec<String>> {
    match &cli.command {
        Command::Generate {
            cash_points,
            days,
            count,
            seed,
            out,
        } => {
            let spec = GenerationSpec {
                cash_points: *cash_points,
                days: *days,
                count: *count,
                seed: *seed,
            };
            Ok(cmd_generate(&spec, out)?
                .iter()
                .map(|p| format!("wrote {}", p.display()))
                .collect())
        }
        Command::Run { experiment, out } => {
            let docs = cmd_run(&experiment.resolve()?, out)?;
            Ok(docs
                .iter()
                .map(|d| {
                    let fit = d
                        .fitness
                        .map_or("-".into(), |f| format!("P={:.4} E={:.4}", f.p, f.e));
                    let cost = d.schedule_cost.map_or("-".into(), |c| format!("{c}"));
                    format!(
                        "instance {}: {} best schedule cost {}",
                        d.instance_index, fit, cost
                    )
                })
                .collect())
        }
        Command::Compare {
            experiment,
            baseline_method,
            baseline_config,
            budgets,
            out,
        } => {
            let first = experiment.resolve()?;
            let second = match baseline_config {
                Some(p) => load_config(p)?,
                None => ExperimentConfig {
                    method: *baseline_method,
                    ..first.clone()
                },
            };
            let doc = cmd_compare(&first, &second, budgets, out)?;
            Ok(doc
                .aggregates
                .iter()
                .map(|a| {
                    format!(
                        "budget {} {}: P>0.99 for {:.2} of {} instances",
                        a.budget, a.method, a.feasible_fraction, a.instances
                    )
                })
                .collect())
        }
        Command::Sweep {
            experiment,
            lambdas,
            out,
        } => {
            let doc = cmd_sweep(&experiment.resolve()?, lambdas, out)?;
            Ok(doc
                .rows
                .iter()
                .map(|r| {
                    format!(
                        "lambda {}: feasible fraction {:.2}",
                        r.lambda, r.feasible_fraction
                    )
                })
                .collect())
        }
    }
}
