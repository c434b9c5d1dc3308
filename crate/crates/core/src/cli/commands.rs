//! Subcommand implementations. Each writes its files atomically and returns
//! the documents it wrote.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, GenerationSpec, Method};
use super::io::{
    read_instance, to_csv, write_atomic, write_instance, write_json, write_trace, OracleSummary,
    SummaryDocument, TraceRow, COMPARISON_SCHEMA, SUMMARY_SCHEMA, SWEEP_SCHEMA,
};
use crate::baselines::{
    penalty_sweep, run_penalty_ga_with, run_penalty_vqe_with, SweepRow, FEASIBLE_P,
};
use crate::cmp::{generate_instance, max_satisfiable, CmpInstance, Scorer, DEFAULT_SEARCH_LIMIT};
use crate::error::{Error, Result};
use crate::metrics::{
    approximation_ratio, brute_force_solve, expectation, gaps, overlap, Expectation, OracleResult,
    ORACLE_LIMIT,
};
use crate::movco::{run_movco_with, RunRecord, RunResult};
use crate::qsim::ParameterVector;
use crate::rng::{Domain, SeedStream};

/// Approximation-ratio thresholds reported by `compare`.
pub const RATIO_THRESHOLDS: [f64; 4] = [0.95, 0.9, 0.85, 0.8];

/// Instance `index` of a generation spec. Its embedded seed alone
/// regenerates it; registers within the search limit also carry their
/// satisfiability cap.
pub fn generated_instance(spec: &GenerationSpec, index: usize) -> Result<CmpInstance> {
    let seed = SeedStream::new(spec.seed).derive_seed(Domain::Instance, index as u64);
    let mut rng = SeedStream::new(seed).substream(Domain::Instance, 0, 0);
    let mut inst = generate_instance(spec.cash_points, spec.days, &mut rng)?;
    inst.seed = Some(seed);
    if inst.n_bits() <= DEFAULT_SEARCH_LIMIT {
        inst.satisfiability_cap = Some(max_satisfiable(&inst, DEFAULT_SEARCH_LIMIT)?);
    }
    Ok(inst)
}

/// Instances referenced by a config, in index order.
pub fn resolve_instances(config: &ExperimentConfig) -> Result<Vec<CmpInstance>> {
    match (&config.instance, &config.generate) {
        (Some(path), None) => Ok(vec![read_instance(path)?]),
        (None, Some(spec)) => (0..spec.count)
            .into_par_iter()
            .map(|i| generated_instance(spec, i))
            .collect(),
        _ => Err(Error::Config(vec![
            "exactly one of instance or generate is required".into(),
        ])),
    }
}

/// Optimizer seed for instance `index`.
pub fn run_seed(config: &ExperimentConfig, index: usize) -> u64 {
    SeedStream::new(config.seed).derive_seed(Domain::Instance, index as u64)
}

fn instance_file(index: usize) -> String {
    format!("instance_{index:03}.json")
}

fn instance_dir(out: &Path, index: usize) -> PathBuf {
    out.join(format!("instance_{index:03}"))
}

/// Writes `spec.count` instance documents into `out`.
pub fn cmd_generate(spec: &GenerationSpec, out: &Path) -> Result<Vec<PathBuf>> {
    if spec.count == 0 {
        return Err(Error::invalid("count must be at least 1"));
    }
    let instances: Vec<CmpInstance> = (0..spec.count)
        .into_par_iter()
        .map(|i| generated_instance(spec, i))
        .collect::<Result<_>>()?;
    instances
        .iter()
        .enumerate()
        .map(|(i, inst)| {
            let path = out.join(instance_file(i));
            write_instance(&path, inst)?;
            Ok(path)
        })
        .collect()
}

/// Runs the configured optimizer. `brute` has no trace and returns `None`.
pub fn run_method(
    config: &ExperimentConfig,
    scorer: &Scorer,
    seed: u64,
) -> Result<Option<RunResult>> {
    Ok(Some(match config.method {
        Method::Movco => run_movco_with(scorer, &config.movco(seed))?,
        Method::PenaltyVqe => run_penalty_vqe_with(scorer, &config.penalty(), &config.spsa(seed))?,
        Method::PenaltyGa => run_penalty_ga_with(scorer, &config.penalty(), &config.ga(), seed)?,
        Method::Brute => return Ok(None),
    }))
}

fn oracle_for(instance: &CmpInstance) -> Result<Option<OracleResult>> {
    if instance.n_bits() <= ORACLE_LIMIT {
        brute_force_solve(instance).map(Some)
    } else {
        Ok(None)
    }
}

/// Expectation, approximation ratio and overlap of one parameter set.
struct Assessment {
    expectation: Expectation,
    ratio: Option<f64>,
    overlap: Option<crate::metrics::Overlap>,
}

fn assess(
    config: &ExperimentConfig,
    scorer: &Scorer,
    oracle: Option<&OracleResult>,
    params: &ParameterVector,
    stream: u64,
) -> Result<Assessment> {
    let sim = config.movco(0).simulator();
    let mut rng = SeedStream::new(config.seed).substream(Domain::Report, stream, 1);
    let exp = expectation(
        params,
        scorer,
        &sim,
        config.expectation,
        config.shots,
        &mut rng,
    )?;
    // Capped instances are scored against their cap-reaching optimum.
    let (ratio, ov) = match oracle {
        Some(o) => (
            Some(approximation_ratio(
                exp.expected_cost,
                scorer.instance(),
                o.c_min,
            )?),
            Some(overlap(params, &sim, o)?),
        ),
        None => (None, None),
    };
    Ok(Assessment {
        expectation: exp,
        ratio,
        overlap: ov,
    })
}

fn params_of(
    config: &ExperimentConfig,
    scorer: &Scorer,
    record: &RunRecord,
) -> Result<ParameterVector> {
    ParameterVector::new(scorer.n_bits(), config.ansatz, record.params.clone())
}

/// Summary and trace of one method on one instance.
pub fn evaluate_run(
    config: &ExperimentConfig,
    instance: &CmpInstance,
    index: usize,
) -> Result<(SummaryDocument, Vec<TraceRow>)> {
    instance.validate()?;
    let scorer = Scorer::new(instance);
    let oracle = oracle_for(instance)?;
    let seed = run_seed(config, index);
    let mut doc = SummaryDocument {
        schema: SUMMARY_SCHEMA.into(),
        method: config.method,
        config: config.clone(),
        instance_index: index,
        run_seed: seed,
        instance: instance.clone(),
        evaluations: 0,
        fitness: None,
        expectation: None,
        schedule: None,
        schedule_cost: None,
        params: None,
        oracle: oracle.as_ref().map(|o| OracleSummary::new(o, instance)),
        approximation_ratio: None,
        overlap: None,
    };

    let Some(run) = run_method(config, &scorer, seed)? else {
        let o = oracle.as_ref().ok_or(Error::ResourceLimit {
            what: "exhaustive search bits",
            requested: instance.n_bits(),
            limit: ORACLE_LIMIT,
        })?;
        doc.schedule = doc.oracle.as_ref().and_then(|s| s.optimal_schedule.clone());
        doc.schedule_cost = Some(o.c_min);
        doc.approximation_ratio = Some(1.0);
        return Ok((doc, Vec::new()));
    };

    let trace = run
        .records
        .iter()
        .map(|r| {
            let a = assess(
                config,
                &scorer,
                oracle.as_ref(),
                &params_of(config, &scorer, r)?,
                r.step as u64,
            )?;
            Ok(TraceRow {
                step: r.step,
                evaluations: r.evaluations,
                best_p: r.best_p,
                mean_p: r.mean_p,
                best_e: r.best_e,
                mean_e: r.mean_e,
                objective: r.objective,
                expected_p: Some(a.expectation.p),
                expected_cost: Some(a.expectation.expected_cost),
                approximation_ratio: a.ratio,
                overlap: a.overlap.map(|o| o.rho),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best = &run.best;
    let a = assess(config, &scorer, oracle.as_ref(), &best.params, u64::MAX)?;
    doc.evaluations = run.records.last().map_or(0, |r| r.evaluations);
    doc.fitness = Some(best.fitness);
    doc.expectation = Some(a.expectation);
    doc.schedule = best.schedule.as_ref().map(|s| s.rows());
    doc.schedule_cost = best.schedule_cost;
    doc.params = Some(best.params.angles().to_vec());
    doc.approximation_ratio = a.ratio;
    doc.overlap = a.overlap;
    Ok((doc, trace))
}

#[derive(Serialize)]
struct Timing {
    wall_seconds: f64,
}

/// Runs the configured method on every instance. Instance `i` writes
/// `instance_iii/summary.json`, `trace.csv` and `timing.json` under `out`.
/// Only `timing.json` depends on the machine.
pub fn cmd_run(config: &ExperimentConfig, out: &Path) -> Result<Vec<SummaryDocument>> {
    config.validate()?;
    let instances = resolve_instances(config)?;
    instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let start = Instant::now();
            let (doc, trace) = evaluate_run(config, inst, i)?;
            let wall_seconds = start.elapsed().as_secs_f64();
            let dir = instance_dir(out, i);
            write_json(&dir.join("summary.json"), &doc)?;
            write_trace(&dir.join("trace.csv"), &trace)?;
            write_json(&dir.join("timing.json"), &Timing { wall_seconds })?;
            Ok(doc)
        })
        .collect()
}

/// One method at one budget on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub instance: usize,
    pub budget: usize,
    pub method: String,
    /// Evaluations actually spent at the checkpoint, at most `budget` when
    /// the trace allows.
    pub evaluations: usize,
    pub p: f64,
    pub expected_cost: f64,
    pub approximation_ratio: Option<f64>,
    pub overlap: Option<f64>,
    /// First method's `P` minus the second's.
    pub p_gap: f64,
    /// Second method's cost minus the first's, relative to the second's.
    pub c_gap: Option<f64>,
}

/// Aggregate of one method at one budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonAggregate {
    pub budget: usize,
    pub method: String,
    pub instances: usize,
    /// Fraction of instances with `P > 0.99`.
    pub feasible_fraction: f64,
    /// Fraction of oracle-solved instances whose ratio reaches each of
    /// [`RATIO_THRESHOLDS`].
    pub ratio_fractions: Option<Vec<f64>>,
    pub mean_p_gap: f64,
    pub mean_c_gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonDocument {
    pub schema: String,
    pub first: ExperimentConfig,
    pub second: ExperimentConfig,
    pub budgets: Vec<usize>,
    pub ratio_thresholds: Vec<f64>,
    pub aggregates: Vec<ComparisonAggregate>,
}

/// Last record within `budget`, or the first record if none fits.
fn checkpoint(records: &[RunRecord], budget: usize) -> &RunRecord {
    records
        .iter()
        .rev()
        .find(|r| r.evaluations <= budget)
        .unwrap_or(&records[0])
}

/// Labels for the two methods; identical methods get positional suffixes.
fn labels(first: &ExperimentConfig, second: &ExperimentConfig) -> [String; 2] {
    if first.method == second.method {
        [
            format!("{}#1", first.method.name()),
            format!("{}#2", second.method.name()),
        ]
    } else {
        [first.method.name().into(), second.method.name().into()]
    }
}

/// Runs both methods on the shared instance set and compares them at each
/// evaluation budget. Writes `comparison.csv` and `comparison.json`.
pub fn cmd_compare(
    first: &ExperimentConfig,
    second: &ExperimentConfig,
    budgets: &[usize],
    out: &Path,
) -> Result<ComparisonDocument> {
    first.validate()?;
    second.validate()?;
    if first.instance != second.instance || first.generate != second.generate {
        return Err(Error::invalid(
            "compared configs reference different instance sets",
        ));
    }
    if budgets.is_empty() {
        return Err(Error::invalid("compare needs at least one budget"));
    }
    if [first.method, second.method].contains(&Method::Brute) {
        return Err(Error::invalid("brute has no evaluation trace to compare"));
    }
    let names = labels(first, second);
    let instances = resolve_instances(first)?;
    let per_instance: Vec<Vec<ComparisonRow>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let scorer = Scorer::new(inst);
            let oracle = oracle_for(inst)?;
            let runs = [first, second].map(|cfg| {
                run_method(cfg, &scorer, run_seed(cfg, i)).map(|r| r.expect("not brute"))
            });
            let [ra, rb] = runs;
            let (ra, rb) = (ra?, rb?);
            let mut rows = Vec::with_capacity(2 * budgets.len());
            for &budget in budgets {
                let pair = [(first, &ra), (second, &rb)].map(|(cfg, run)| {
                    let rec = checkpoint(&run.records, budget);
                    assess(
                        cfg,
                        &scorer,
                        oracle.as_ref(),
                        &params_of(cfg, &scorer, rec)?,
                        rec.step as u64,
                    )
                    .map(|a| (rec.evaluations, a))
                });
                let [a, b] = pair;
                let (a, b) = (a?, b?);
                let g = gaps(&a.1.expectation, &b.1.expectation);
                for (name, (evaluations, s)) in names.iter().zip([a, b]) {
                    rows.push(ComparisonRow {
                        instance: i,
                        budget,
                        method: name.clone(),
                        evaluations,
                        p: s.expectation.p,
                        expected_cost: s.expectation.expected_cost,
                        approximation_ratio: s.ratio,
                        overlap: s.overlap.map(|o| o.rho),
                        p_gap: g.p_gap,
                        c_gap: g.c_gap,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ComparisonRow> = per_instance.into_iter().flatten().collect();

    let mut aggregates = Vec::new();
    for &budget in budgets {
        for name in &names {
            let sel: Vec<&ComparisonRow> = rows
                .iter()
                .filter(|r| r.budget == budget && &r.method == name)
                .collect();
            let n = sel.len() as f64;
            let ratios: Vec<f64> = sel.iter().filter_map(|r| r.approximation_ratio).collect();
            let c_gaps: Vec<f64> = sel.iter().filter_map(|r| r.c_gap).collect();
            aggregates.push(ComparisonAggregate {
                budget,
                method: name.clone(),
                instances: sel.len(),
                feasible_fraction: sel.iter().filter(|r| r.p > FEASIBLE_P).count() as f64 / n,
                ratio_fractions: (!ratios.is_empty()).then(|| {
                    RATIO_THRESHOLDS
                        .iter()
                        .map(|&t| {
                            ratios.iter().filter(|&&r| r >= t).count() as f64 / ratios.len() as f64
                        })
                        .collect()
                }),
                mean_p_gap: sel.iter().map(|r| r.p_gap).sum::<f64>() / n,
                mean_c_gap: (!c_gaps.is_empty())
                    .then(|| c_gaps.iter().sum::<f64>() / c_gaps.len() as f64),
            });
        }
    }
    let doc = ComparisonDocument {
        schema: COMPARISON_SCHEMA.into(),
        first: first.clone(),
        second: second.clone(),
        budgets: budgets.to_vec(),
        ratio_thresholds: RATIO_THRESHOLDS.to_vec(),
        aggregates,
    };
    write_atomic(
        &out.join("comparison.csv"),
        &to_csv(COMPARISON_SCHEMA, &rows)?,
    )?;
    write_json(&out.join("comparison.json"), &doc)?;
    Ok(doc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepDocument {
    pub schema: String,
    pub config: ExperimentConfig,
    pub lambdas: Vec<f64>,
    pub rows: Vec<SweepRow>,
}

/// Penalized VQE over a grid of equal penalty weights. Writes `sweep.csv`
/// and `sweep.json`.
pub fn cmd_sweep(config: &ExperimentConfig, lambdas: &[f64], out: &Path) -> Result<SweepDocument> {
    config.validate()?;
    if let Some(bad) = lambdas.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(Error::invalid(format!(
            "penalty weight must be non-negative, got {bad}"
        )));
    }
    let instances = resolve_instances(config)?;
    let rows = penalty_sweep(
        &instances,
        lambdas,
        &config.penalty(),
        &config.spsa(config.seed),
    )?;
    let doc = SweepDocument {
        schema: SWEEP_SCHEMA.into(),
        config: config.clone(),
        lambdas: lambdas.to_vec(),
        rows,
    };
    write_atomic(&out.join("sweep.csv"), &to_csv(SWEEP_SCHEMA, &doc.rows)?)?;
    write_json(&out.join("sweep.json"), &doc)?;
    Ok(doc)
}
