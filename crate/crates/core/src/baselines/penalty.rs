//! Penalized single-objective baselines: VQE driven by SPSA, the same
//! objective driven by the genetic engine, and a penalty-weight sweep.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spsa::{spsa_minimize, SpsaConfig};
use crate::cmp::{CmpInstance, Scorer};
use crate::error::{Error, Result};
use crate::metrics::{
    approximation_ratio, brute_force_solve, exact_expectation_product, exact_expectation_state,
};
use crate::movco::{initial_genomes, BestSolution, RunRecord, RunResult};
use crate::nsga2::{evolve, GaConfig};
use crate::qsim::{init_for, Ansatz, ParameterVector, Simulator, DEFAULT_STATEVECTOR_LIMIT};
use crate::rng::{Domain, Rng, SeedStream};

/// `P > FEASIBLE_P` marks an instance whose samples are almost all feasible.
pub const FEASIBLE_P: f64 = 0.99;

fn default_limit() -> usize {
    DEFAULT_STATEVECTOR_LIMIT
}

/// Penalty weights, shots and ansatz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyConfig {
    /// Added once when the final-day total exceeds its cap.
    pub lambda_f: f64,
    /// Added per day whose transaction count exceeds the limit.
    pub lambda_l: f64,
    pub shots: usize,
    pub ansatz: Ansatz,
    #[serde(default = "default_limit")]
    pub statevector_limit: usize,
}

impl Default for PenaltyConfig {
    fn default() -> Self {
        Self {
            lambda_f: 25.0,
            lambda_l: 25.0,
            shots: 8192,
            ansatz: Ansatz::Layered { layers: 1 },
            statevector_limit: DEFAULT_STATEVECTOR_LIMIT,
        }
    }
}

impl PenaltyConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        for (name, l) in [("lambda_f", self.lambda_f), ("lambda_l", self.lambda_l)] {
            if !(l >= 0.0 && l.is_finite()) {
                errs.push(format!("{name} must be finite and non-negative, got {l}"));
            }
        }
        if self.shots == 0 {
            errs.push("shots must be at least 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn simulator(&self) -> Simulator {
        Simulator::with_limit(self.statevector_limit)
    }
}

/// Sample mean of the penalized cost over one batch.
pub fn penalized_mean(
    params: &ParameterVector,
    scorer: &Scorer,
    sim: &Simulator,
    config: &PenaltyConfig,
    rng: &mut Rng,
) -> Result<f64> {
    let batch = sim.sample(params, config.shots, rng)?;
    let total: f64 = batch
        .iter()
        .map(|shot| {
            scorer
                .score(shot)
                .penalized(config.lambda_f, config.lambda_l)
        })
        .sum();
    Ok(total / batch.shots() as f64)
}

fn check(scorer: &Scorer, config: &PenaltyConfig) -> Result<Simulator> {
    config.validate()?;
    let sim = config.simulator();
    if matches!(config.ansatz, Ansatz::Layered { .. }) && !sim.fits(scorer.n_bits()) {
        return Err(Error::ResourceLimit {
            what: "statevector qubits",
            requested: scorer.n_bits(),
            limit: sim.statevector_limit,
        });
    }
    Ok(sim)
}

fn scalar_record(
    step: usize,
    evaluations: usize,
    objective: Option<f64>,
    params: Vec<f64>,
) -> RunRecord {
    RunRecord {
        step,
        evaluations,
        best_p: None,
        mean_p: None,
        best_e: None,
        mean_e: None,
        objective,
        params,
    }
}

/// Penalized VQE optimized by SPSA. Record 0 is the initial point.
pub fn run_penalty_vqe(
    instance: &CmpInstance,
    penalty: &PenaltyConfig,
    spsa: &SpsaConfig,
) -> Result<RunResult> {
    instance.validate()?;
    run_penalty_vqe_with(&Scorer::new(instance), penalty, spsa)
}

/// [`run_penalty_vqe`] with a prebuilt scorer.
pub fn run_penalty_vqe_with(
    scorer: &Scorer,
    penalty: &PenaltyConfig,
    spsa: &SpsaConfig,
) -> Result<RunResult> {
    let sim = check(scorer, penalty)?;
    let n = scorer.n_bits();
    let seeds = SeedStream::new(spsa.seed);
    let theta0 = init_for(penalty.ansatz, n, &mut seeds.substream(Domain::Init, 0, 0))?;
    let objective = |theta: &[f64], rng: &mut Rng| -> Result<f64> {
        let params = ParameterVector::new(n, penalty.ansatz, theta.to_vec())?;
        penalized_mean(&params, scorer, &sim, penalty, rng)
    };
    let out = spsa_minimize(objective, theta0.angles(), spsa)?;

    let mut records = vec![scalar_record(0, 0, None, theta0.angles().to_vec())];
    records.extend(
        out.history
            .into_iter()
            .map(|s| scalar_record(s.iteration, s.evaluations, Some(s.value), s.theta)),
    );
    let params = theta0.with_angles(out.theta)?;
    let mut rng = seeds.substream(Domain::Report, 0, 0);
    let best = BestSolution::resampled(params, None, scorer, &sim, penalty.shots, &mut rng)?;
    Ok(RunResult {
        records,
        final_population: Vec::new(),
        best,
    })
}

/// Penalized objective driven by the genetic engine with one objective, so
/// ranking reduces to sorting by mean penalized cost.
pub fn run_penalty_ga(
    instance: &CmpInstance,
    penalty: &PenaltyConfig,
    ga: &GaConfig,
    seed: u64,
) -> Result<RunResult> {
    instance.validate()?;
    run_penalty_ga_with(&Scorer::new(instance), penalty, ga, seed)
}

/// [`run_penalty_ga`] with a prebuilt scorer.
pub fn run_penalty_ga_with(
    scorer: &Scorer,
    penalty: &PenaltyConfig,
    ga: &GaConfig,
    seed: u64,
) -> Result<RunResult> {
    let sim = check(scorer, penalty)?;
    let n = scorer.n_bits();
    let seeds = SeedStream::new(seed);
    let initial = initial_genomes(penalty.ansatz, n, ga.population_size, seeds)?;
    let evaluator = |genes: &[f64], rng: &mut Rng| -> Result<Vec<f64>> {
        let params = ParameterVector::new(n, penalty.ansatz, genes.to_vec())?;
        Ok(vec![penalized_mean(&params, scorer, &sim, penalty, rng)?])
    };
    let evo = evolve(initial, evaluator, ga, seeds)?;

    let best_of = |pop: &[crate::nsga2::Individual]| -> usize {
        (0..pop.len())
            .min_by(|&a, &b| {
                pop[a].objectives[0]
                    .total_cmp(&pop[b].objectives[0])
                    .then(a.cmp(&b))
            })
            .expect("non-empty population")
    };
    let records = evo
        .history
        .iter()
        .map(|g| {
            let b = best_of(&g.population);
            scalar_record(
                g.generation,
                g.evaluations,
                Some(g.population[b].objectives[0]),
                g.population[b].genes.clone(),
            )
        })
        .collect();
    let b = best_of(&evo.population);
    let params = ParameterVector::new(n, penalty.ansatz, evo.population[b].genes.clone())?;
    let mut rng = seeds.substream(Domain::Report, 0, 0);
    let best = BestSolution::resampled(params, None, scorer, &sim, penalty.shots, &mut rng)?;
    Ok(RunResult {
        records,
        final_population: evo.population,
        best,
    })
}

/// One penalty weight's aggregate over a set of instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub instances: usize,
    /// Fraction of instances whose final exact `P` exceeds [`FEASIBLE_P`].
    pub feasible_fraction: f64,
    /// Mean approximation ratio over those instances.
    pub mean_approximation_ratio: Option<f64>,
}

/// Runs penalized VQE for every `(instance, lambda)` with `lambda_f =
/// lambda_l = lambda`. Instance `i` uses the SPSA seed derived from
/// `spsa.seed` and `i`, the same for every weight.
pub fn penalty_sweep(
    instances: &[CmpInstance],
    lambdas: &[f64],
    penalty: &PenaltyConfig,
    spsa: &SpsaConfig,
) -> Result<Vec<SweepRow>> {
    if instances.is_empty() {
        return Err(Error::invalid("penalty sweep needs at least one instance"));
    }
    if lambdas.is_empty() {
        return Err(Error::invalid("penalty sweep needs at least one weight"));
    }
    let prepared: Vec<(Scorer, f64)> = instances
        .iter()
        .map(|inst| Ok((Scorer::new(inst), brute_force_solve(inst)?.c_min)))
        .collect::<Result<_>>()?;
    let master = SeedStream::new(spsa.seed);
    let jobs: Vec<(usize, usize)> = (0..lambdas.len())
        .flat_map(|l| (0..instances.len()).map(move |i| (l, i)))
        .collect();
    // (P, approximation ratio) per job.
    let outcomes: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(l, i)| {
            let pen = PenaltyConfig {
                lambda_f: lambdas[l],
                lambda_l: lambdas[l],
                ..penalty.clone()
            };
            let cfg = SpsaConfig {
                seed: master.derive_seed(Domain::Instance, i as u64),
                ..spsa.clone()
            };
            let (scorer, c_min) = &prepared[i];
            let run = run_penalty_vqe_with(scorer, &pen, &cfg)?;
            let params = &run.best.params;
            let exp = match params.ansatz() {
                Ansatz::Product => exact_expectation_product(params, scorer)?,
                Ansatz::Layered { .. } => {
                    exact_expectation_state(&pen.simulator().build_state(params)?, scorer)
                }
            };
            Ok((
                exp.p,
                approximation_ratio(exp.expected_cost, scorer.instance(), *c_min)?,
            ))
        })
        .collect::<Result<_>>()?;

    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(l, &lambda)| {
            let rows = &outcomes[l * instances.len()..(l + 1) * instances.len()];
            let feasible: Vec<f64> = rows
                .iter()
                .filter(|(p, _)| *p > FEASIBLE_P)
                .map(|(_, r)| *r)
                .collect();
            SweepRow {
                lambda,
                instances: instances.len(),
                feasible_fraction: feasible.len() as f64 / instances.len() as f64,
                mean_approximation_ratio: (!feasible.is_empty())
                    .then(|| feasible.iter().sum::<f64>() / feasible.len() as f64),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmp::LEVELS;

    fn tiny() -> CmpInstance {
        CmpInstance {
            cash_points: 2,
            days: 2,
            levels: LEVELS,
            first_day_price: vec![4.0, 8.0],
            price: vec![2.0, 4.0],
            prediction: vec![vec![5, 1], vec![1, 2]],
            final_cash_cap: 2,
            daily_tx_limit: 1,
            seed: None,
            satisfiability_cap: None,
        }
    }

    fn pen(shots: usize) -> PenaltyConfig {
        PenaltyConfig {
            shots,
            ..PenaltyConfig::default()
        }
    }

    #[test]
    fn zero_penalty_is_plain_cost() {
        let inst = tiny();
        let scorer = Scorer::new(&inst);
        let mut r = SeedStream::new(1).substream(Domain::Init, 0, 0);
        let p = init_for(Ansatz::Layered { layers: 1 }, 8, &mut r).unwrap();
        let cfg = PenaltyConfig {
            lambda_f: 0.0,
            lambda_l: 0.0,
            ..pen(256)
        };
        let sim = Simulator::default();
        let mut rng = SeedStream::new(2).substream(Domain::Evaluation, 0, 0);
        let a = penalized_mean(&p, &scorer, &sim, &cfg, &mut rng).unwrap();
        let mut rng = SeedStream::new(2).substream(Domain::Evaluation, 0, 0);
        let batch = sim.sample(&p, 256, &mut rng).unwrap();
        let plain = crate::movco::summarize_batch(&scorer, &batch).mean_cost;
        assert_eq!(a, plain);
    }

    #[test]
    fn vqe_trace_shape_and_determinism() {
        let inst = tiny();
        let spsa = SpsaConfig {
            iterations: 10,
            seed: 3,
            ..SpsaConfig::default()
        };
        let a = run_penalty_vqe(&inst, &pen(256), &spsa).unwrap();
        assert_eq!(a.records.len(), 11);
        assert_eq!(a.records[10].evaluations, 20);
        assert!(a
            .records
            .windows(2)
            .all(|w| w[1].evaluations > w[0].evaluations));
        assert_eq!(a, run_penalty_vqe(&inst, &pen(256), &spsa).unwrap());
    }

    #[test]
    fn ga_trace_shape() {
        let inst = tiny();
        let ga = GaConfig {
            generations: 3,
            ..GaConfig::default()
        };
        let r = run_penalty_ga(&inst, &pen(256), &ga, 5).unwrap();
        assert_eq!(r.records.len(), 4);
        assert_eq!(r.records[3].evaluations, 40);
        let objs: Vec<f64> = r.records.iter().map(|x| x.objective.unwrap()).collect();
        assert!(objs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn sweep_shapes() {
        let spsa = SpsaConfig {
            iterations: 4,
            ..SpsaConfig::default()
        };
        let rows = penalty_sweep(&[tiny()], &[25.0], &pen(64), &spsa).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].instances, 1);
        assert!(penalty_sweep(&[], &[25.0], &pen(64), &spsa).is_err());
        assert!(penalty_sweep(&[tiny()], &[], &pen(64), &spsa).is_err());
    }
}
