//! The MOVCO optimizer: two fitness functions computed from one batch of
//! measured schedules, minimized jointly by NSGA-II over the ansatz angles.
//!
//! For a batch of `K` shots:
//!
//! * `P` is the mean over shots of the fraction of constraints the shot
//!   satisfies (normalized by the satisfiability cap when one is set);
//! * `E` is the sum of `cost - C_max` over the fully feasible shots, divided
//!   by `K` (not by the number of feasible shots), so `C_min - C_max <= E <= 0`.
//!
//! The engine minimizes `(1 - P, E)`.

use serde::{Deserialize, Serialize};

use crate::cmp::{CashSchedule, CmpInstance, Scorer};
use crate::error::{Error, Result};
use crate::nsga2::{evolve, GaConfig, Individual};
use crate::qsim::{
    init_for, Ansatz, ParameterVector, SampleBatch, Simulator, DEFAULT_STATEVECTOR_LIMIT,
};
use crate::rng::{Domain, Rng, SeedStream};

/// Constraint-satisfaction fraction and restricted energy of one batch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessPair {
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

impl FitnessPair {
    /// Minimized objective vector.
    pub fn objectives(&self) -> Vec<f64> {
        vec![1.0 - self.p, self.e]
    }

    pub fn from_objectives(obj: &[f64]) -> Self {
        Self {
            p: 1.0 - obj[0],
            e: obj[1],
        }
    }

    /// `true` when `self` is preferred by the best-individual rule: larger
    /// `P`, then smaller `E`.
    pub fn better_than(&self, other: &FitnessPair) -> bool {
        self.p > other.p || (self.p == other.p && self.e < other.e)
    }
}

/// Everything one batch says about the instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchSummary {
    pub fitness: FitnessPair,
    pub feasible_shots: usize,
    /// Cheapest feasible shot as `(cost, shot index)`, first index on ties.
    pub best_feasible: Option<(f64, usize)>,
    /// Mean transaction cost over all shots.
    pub mean_cost: f64,
}

/// Scores every shot of a batch once.
pub fn summarize_batch(scorer: &Scorer, batch: &SampleBatch) -> BatchSummary {
    let k = batch.shots();
    let norm = scorer.normalizer() as u64;
    let mut satisfied = 0u64;
    let mut energy = 0.0;
    let mut cost_sum = 0.0;
    let mut feasible = 0;
    let mut best: Option<(f64, usize)> = None;
    for (i, shot) in batch.iter().enumerate() {
        let s = scorer.score(shot);
        satisfied += (s.satisfied as u64).min(norm);
        cost_sum += s.cost;
        if scorer.is_feasible(&s) {
            feasible += 1;
            energy += s.cost - scorer.cost_max();
            if best.map_or(true, |(c, _)| s.cost < c) {
                best = Some((s.cost, i));
            }
        }
    }
    BatchSummary {
        fitness: FitnessPair {
            p: satisfied as f64 / (norm * k as u64) as f64,
            e: energy / k as f64,
        },
        feasible_shots: feasible,
        best_feasible: best,
        mean_cost: cost_sum / k as f64,
    }
}

/// `(P, E)` of one `shots`-shot batch of the ansatz.
pub fn fitness(
    params: &ParameterVector,
    scorer: &Scorer,
    sim: &Simulator,
    shots: usize,
    rng: &mut Rng,
) -> Result<FitnessPair> {
    check_register(params, scorer)?;
    let batch = sim.sample(params, shots, rng)?;
    Ok(summarize_batch(scorer, &batch).fitness)
}

fn check_register(params: &ParameterVector, scorer: &Scorer) -> Result<()> {
    if params.n_qubits() != scorer.n_bits() {
        return Err(Error::invalid(format!(
            "ansatz has {} qubits, instance needs {}",
            params.n_qubits(),
            scorer.n_bits()
        )));
    }
    Ok(())
}

/// How reported expectation values are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectationMode {
    /// Exact expectation over the ansatz distribution.
    #[default]
    Exact,
    /// Estimate from a fresh `K`-shot batch.
    Sampled,
}

fn default_limit() -> usize {
    DEFAULT_STATEVECTOR_LIMIT
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovcoConfig {
    pub ansatz: Ansatz,
    pub shots: usize,
    pub ga: GaConfig,
    pub seed: u64,
    #[serde(default)]
    pub expectation: ExpectationMode,
    #[serde(default = "default_limit")]
    pub statevector_limit: usize,
}

impl Default for MovcoConfig {
    fn default() -> Self {
        Self {
            ansatz: Ansatz::Layered { layers: 1 },
            shots: 8192,
            ga: GaConfig::default(),
            seed: 0,
            expectation: ExpectationMode::Exact,
            statevector_limit: DEFAULT_STATEVECTOR_LIMIT,
        }
    }
}

impl MovcoConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = match self.ga.validate() {
            Ok(()) => Vec::new(),
            Err(Error::Config(v)) => v,
            Err(e) => vec![e.to_string()],
        };
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

/// One row of an optimizer trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Generation or iteration; 0 is the initial point.
    pub step: usize,
    /// Cumulative circuit evaluations.
    pub evaluations: usize,
    pub best_p: Option<f64>,
    pub mean_p: Option<f64>,
    pub best_e: Option<f64>,
    pub mean_e: Option<f64>,
    /// Scalar objective of single-objective methods.
    pub objective: Option<f64>,
    /// Angles of the step's best (or current) parameter vector.
    pub params: Vec<f64>,
}

/// Final parameters chosen from a run and what a fresh batch of them gave.
#[derive(Clone, Debug, PartialEq)]
pub struct BestSolution {
    pub params: ParameterVector,
    /// Fitness the parameters were selected with, or that of the resampled
    /// batch for methods that do not track it.
    pub fitness: FitnessPair,
    /// Cheapest feasible schedule in a fresh batch.
    pub schedule: Option<CashSchedule>,
    pub schedule_cost: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    /// One record per step, starting with the initial evaluation.
    pub records: Vec<RunRecord>,
    /// Empty for trajectory methods.
    pub final_population: Vec<Individual>,
    pub best: BestSolution,
}

/// Index of the best individual: maximal `P`, then minimal `E`, then first.
pub fn best_index(fitness: &[FitnessPair]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, f) in fitness.iter().enumerate() {
        if best.map_or(true, |b| f.better_than(&fitness[b])) {
            best = Some(i);
        }
    }
    best
}

/// Resamples `params` once, returning the batch summary and the cheapest
/// feasible schedule of the batch.
pub fn resample(
    params: &ParameterVector,
    scorer: &Scorer,
    sim: &Simulator,
    shots: usize,
    rng: &mut Rng,
) -> Result<(BatchSummary, Option<(CashSchedule, f64)>)> {
    check_register(params, scorer)?;
    let batch = sim.sample(params, shots, rng)?;
    let summary = summarize_batch(scorer, &batch);
    let best = summary.best_feasible.map(|(cost, i)| {
        let s = CashSchedule::decode(batch.shot(i), batch.n_bits(), scorer.instance())
            .expect("register checked");
        (s, cost)
    });
    Ok((summary, best))
}

impl BestSolution {
    /// Resamples `params` and records the cheapest feasible schedule.
    pub fn resampled(
        params: ParameterVector,
        fitness: Option<FitnessPair>,
        scorer: &Scorer,
        sim: &Simulator,
        shots: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        let (summary, found) = resample(&params, scorer, sim, shots, rng)?;
        Ok(BestSolution {
            params,
            fitness: fitness.unwrap_or(summary.fitness),
            schedule: found.as_ref().map(|(s, _)| s.clone()),
            schedule_cost: found.map(|(_, c)| c),
        })
    }
}

/// Picks the best individual of a final population and resamples it.
pub fn extract_best(
    population: &[Individual],
    ansatz: Ansatz,
    scorer: &Scorer,
    sim: &Simulator,
    shots: usize,
    rng: &mut Rng,
) -> Result<BestSolution> {
    let fit: Vec<FitnessPair> = population
        .iter()
        .map(|i| FitnessPair::from_objectives(&i.objectives))
        .collect();
    let b = best_index(&fit).ok_or_else(|| Error::invalid("empty population"))?;
    let params = ParameterVector::new(scorer.n_bits(), ansatz, population[b].genes.clone())?;
    BestSolution::resampled(params, Some(fit[b]), scorer, sim, shots, rng)
}

fn record_of(step: usize, evaluations: usize, population: &[Individual]) -> RunRecord {
    let fit: Vec<FitnessPair> = population
        .iter()
        .map(|i| FitnessPair::from_objectives(&i.objectives))
        .collect();
    let n = fit.len() as f64;
    let b = best_index(&fit).expect("non-empty population");
    RunRecord {
        step,
        evaluations,
        best_p: Some(fit.iter().map(|f| f.p).fold(f64::NEG_INFINITY, f64::max)),
        mean_p: Some(fit.iter().map(|f| f.p).sum::<f64>() / n),
        best_e: Some(fit.iter().map(|f| f.e).fold(f64::INFINITY, f64::min)),
        mean_e: Some(fit.iter().map(|f| f.e).sum::<f64>() / n),
        objective: None,
        params: population[b].genes.clone(),
    }
}

/// Initial angles of `count` individuals, individual `i` drawn from the
/// `(Init, i)` substream.
pub fn initial_genomes(
    ansatz: Ansatz,
    n_qubits: usize,
    count: usize,
    seeds: SeedStream,
) -> Result<Vec<Vec<f64>>> {
    (0..count)
        .map(|i| {
            init_for(
                ansatz,
                n_qubits,
                &mut seeds.substream(Domain::Init, i as u64, 0),
            )
            .map(|p| p.into_angles())
        })
        .collect()
}

/// Runs MOVCO on one instance.
pub fn run_movco(instance: &CmpInstance, config: &MovcoConfig) -> Result<RunResult> {
    instance.validate()?;
    config.validate()?;
    let scorer = Scorer::new(instance);
    run_movco_with(&scorer, config)
}

/// [`run_movco`] with a prebuilt scorer.
pub fn run_movco_with(scorer: &Scorer, config: &MovcoConfig) -> Result<RunResult> {
    config.validate()?;
    let n = scorer.n_bits();
    let sim = config.simulator();
    if matches!(config.ansatz, Ansatz::Layered { .. }) && !sim.fits(n) {
        return Err(Error::ResourceLimit {
            what: "statevector qubits",
            requested: n,
            limit: sim.statevector_limit,
        });
    }
    let seeds = SeedStream::new(config.seed);
    let initial = initial_genomes(config.ansatz, n, config.ga.population_size, seeds)?;
    let ansatz = config.ansatz;
    let shots = config.shots;

    let evaluator = |genes: &[f64], rng: &mut Rng| -> Result<Vec<f64>> {
        let params = ParameterVector::new(n, ansatz, genes.to_vec())?;
        let f = fitness(&params, scorer, &sim, shots, rng)?;
        debug_assert!(f.e <= 0.0 && (0.0..=1.0).contains(&f.p));
        Ok(f.objectives())
    };
    let evo = evolve(initial, evaluator, &config.ga, seeds)?;

    let records = evo
        .history
        .iter()
        .map(|g| record_of(g.generation, g.evaluations, &g.population))
        .collect();
    let mut rng = seeds.substream(Domain::Report, 0, 0);
    let best = extract_best(&evo.population, ansatz, scorer, &sim, shots, &mut rng)?;
    Ok(RunResult {
        records,
        final_population: evo.population,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmp::LEVELS;
    use crate::qsim::{BitString, SampleBatch};

    fn fig3_like() -> CmpInstance {
        // C_max = 2*(2+4) + (2+4) = 18.
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

    fn batch_of(inst: &CmpInstance, rows: &[&[Vec<u8>]]) -> SampleBatch {
        let shots: Vec<BitString> = rows
            .iter()
            .map(|m| CashSchedule::from_matrix(m).unwrap().encode())
            .collect();
        SampleBatch::from_bitstrings(inst.n_bits(), &shots).unwrap()
    }

    #[test]
    fn no_feasible_sample_gives_zero_energy() {
        let inst = CmpInstance::worked_example();
        let scorer = Scorer::new(&inst);
        // Final total 6 > 1 and two transactions on day 0.
        let m = vec![vec![3, 3, 3, 3], vec![3, 3, 3, 3]];
        let s = summarize_batch(&scorer, &batch_of(&inst, &[&m, &m]));
        assert_eq!(s.fitness.e, 0.0);
        assert_eq!(s.feasible_shots, 0);
        assert!(s.fitness.p < 1.0);
    }

    #[test]
    fn saturated_batch_attains_lower_bound() {
        let inst = CmpInstance::worked_example();
        let scorer = Scorer::new(&inst);
        let m = vec![vec![2, 2, 3, 0], vec![1, 1, 0, 1]];
        let s = summarize_batch(&scorer, &batch_of(&inst, &[&m, &m, &m]));
        assert_eq!(
            s.fitness,
            FitnessPair {
                p: 1.0,
                e: 14.0 - 30.0
            }
        );
        assert_eq!(s.best_feasible, Some((14.0, 0)));
    }

    #[test]
    fn energy_divides_by_all_shots() {
        let inst = CmpInstance::worked_example();
        let scorer = Scorer::new(&inst);
        let good = vec![vec![2, 2, 3, 0], vec![1, 1, 0, 1]];
        let bad = vec![vec![3, 3, 3, 3], vec![3, 3, 3, 3]];
        let s = summarize_batch(&scorer, &batch_of(&inst, &[&good, &bad]));
        assert_eq!(s.fitness.e, (14.0 - 30.0) / 2.0);
        assert!(s.fitness.p >= 0.5);
    }

    #[test]
    fn fig3_class_pareto_point() {
        let inst = fig3_like();
        assert_eq!(inst.cost_upper_bound(), 18.0);
        let scorer = Scorer::new(&inst);
        // Brute force the optimum, then saturate a batch with it.
        let (best_cost, x) = (0..1u64 << 8)
            .filter_map(|x| {
                let s = scorer.score(&[x]);
                scorer.is_feasible(&s).then_some((s.cost, x))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        let bits = BitString::from_index(x, 8);
        let batch = SampleBatch::from_bitstrings(8, &[bits.clone(), bits]).unwrap();
        let f = summarize_batch(&scorer, &batch).fitness;
        assert_eq!(
            f,
            FitnessPair {
                p: 1.0,
                e: best_cost - 18.0
            }
        );
    }

    #[test]
    fn selection_rule() {
        let a = FitnessPair { p: 1.0, e: -6.0 };
        let b = FitnessPair { p: 0.9, e: -7.0 };
        assert_eq!(best_index(&[a, b]), Some(0));
        assert_eq!(best_index(&[b, a]), Some(1));
        assert_eq!(best_index(&[a]), Some(0));
        let c = FitnessPair { p: 1.0, e: -4.0 };
        assert_eq!(best_index(&[c, a]), Some(1));
        assert_eq!(best_index(&[]), None);
    }

    fn small_config(generations: usize, seed: u64) -> MovcoConfig {
        MovcoConfig {
            shots: 512,
            ga: GaConfig {
                generations,
                ..GaConfig::default()
            },
            seed,
            ..MovcoConfig::default()
        }
    }

    #[test]
    fn zero_generations_is_initial_evaluation() {
        let inst = fig3_like();
        let r = run_movco(&inst, &small_config(0, 1)).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.records[0].evaluations, 10);
        assert_eq!(r.final_population.len(), 10);
    }

    #[test]
    fn runs_are_deterministic_and_bounded() {
        let inst = fig3_like();
        let a = run_movco(&inst, &small_config(5, 2)).unwrap();
        let b = run_movco(&inst, &small_config(5, 2)).unwrap();
        assert_eq!(a, b);
        for ind in &a.final_population {
            let f = FitnessPair::from_objectives(&ind.objectives);
            assert!(f.e <= 0.0 && f.e >= -18.0);
            assert!((0.0..=1.0).contains(&f.p));
        }
        assert_eq!(a.records.len(), 6);
        assert_eq!(a.records.last().unwrap().evaluations, 60);
    }

    #[test]
    fn parallel_matches_serial() {
        let inst = fig3_like();
        let mut c = small_config(4, 3);
        let a = run_movco(&inst, &c).unwrap();
        c.ga.parallel = true;
        assert_eq!(a, run_movco(&inst, &c).unwrap());
    }

    #[test]
    fn all_feasible_instance_has_full_satisfaction() {
        let inst = CmpInstance {
            final_cash_cap: 6,
            daily_tx_limit: 2,
            prediction: vec![vec![1, 2], vec![0, 3]],
            ..fig3_like()
        };
        let r = run_movco(&inst, &small_config(2, 4)).unwrap();
        assert!(r
            .records
            .iter()
            .all(|rec| rec.best_p == Some(1.0) && rec.mean_p == Some(1.0)));
    }

    #[test]
    fn rejects_mismatched_register() {
        let inst = fig3_like();
        let scorer = Scorer::new(&inst);
        let p = ParameterVector::new(4, Ansatz::Product, vec![0.0; 4]).unwrap();
        let mut rng = SeedStream::new(0).substream(Domain::Evaluation, 0, 0);
        assert!(fitness(&p, &scorer, &Simulator::default(), 10, &mut rng).is_err());
    }
}
