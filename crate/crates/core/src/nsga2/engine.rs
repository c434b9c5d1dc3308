//! The generational loop.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::crowding::crowding_distance;
use super::operators::{polynomial_mutation, sbx_crossover, tournament_select, GeneBounds, Ranked};
use super::sort::nondominated_sort;
use crate::error::{Error, Result};
use crate::rng::{Domain, Rng, SeedStream};

/// One member of the population.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genes: Vec<f64>,
    /// Minimized objective values.
    pub objectives: Vec<f64>,
    /// Front index starting at 1; `None` before ranking.
    pub rank: Option<usize>,
    pub crowding: f64,
}

impl Individual {
    pub fn new(genes: Vec<f64>, objectives: Vec<f64>) -> Self {
        Self {
            genes,
            objectives,
            rank: None,
            crowding: 0.0,
        }
    }
}

impl Ranked for Individual {
    fn rank(&self) -> usize {
        self.rank.unwrap_or(usize::MAX)
    }
    fn crowding(&self) -> f64 {
        self.crowding
    }
}

pub type Population = Vec<Individual>;

/// Sizes and operator hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub offspring_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    /// Per-gene mutation probability; `None` means `1 / genome length`.
    pub mutation_prob: Option<f64>,
    pub mutation_eta: f64,
    pub bounds: GeneBounds,
    /// Evaluate each generation's offspring on the rayon pool.
    #[serde(default)]
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 10,
            offspring_size: 10,
            generations: 100,
            crossover_prob: 0.9,
            crossover_eta: 15.0,
            mutation_prob: None,
            mutation_eta: 20.0,
            bounds: GeneBounds::angles(),
            parallel: false,
        }
    }
}

impl GaConfig {
    /// Every violated field, or `Ok`.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.population_size == 0 {
            errs.push("population_size must be at least 1".to_string());
        }
        if self.offspring_size == 0 {
            errs.push("offspring_size must be at least 1".to_string());
        }
        let probs = [
            ("crossover_prob", Some(self.crossover_prob)),
            ("mutation_prob", self.mutation_prob),
        ];
        for (name, p) in probs {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    errs.push(format!("{name} must lie in [0, 1], got {p}"));
                }
            }
        }
        for (name, eta) in [
            ("crossover_eta", self.crossover_eta),
            ("mutation_eta", self.mutation_eta),
        ] {
            if !(eta >= 0.0 && eta.is_finite()) {
                errs.push(format!("{name} must be finite and non-negative, got {eta}"));
            }
        }
        if let Err(e) = self.bounds.validate(None) {
            errs.push(e.to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Evaluator calls made by a full run.
    pub fn total_evaluations(&self) -> usize {
        self.population_size + self.offspring_size * self.generations
    }
}

/// Population snapshot after one generation's survivor selection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    /// 0 for the evaluated initial population.
    pub generation: usize,
    /// Cumulative evaluator calls up to and including this generation.
    pub evaluations: usize,
    pub population: Population,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evolution {
    pub population: Population,
    /// `generations + 1` records, starting with the initial population.
    pub history: Vec<GenerationRecord>,
}

/// Assigns ranks and crowding in place and returns the fronts.
pub fn rank_and_crowd(pop: &mut [Individual]) -> Vec<Vec<usize>> {
    let objs: Vec<&[f64]> = pop.iter().map(|i| i.objectives.as_slice()).collect();
    let fronts = nondominated_sort(&objs);
    for (r, front) in fronts.iter().enumerate() {
        let fo: Vec<&[f64]> = front
            .iter()
            .map(|&i| pop[i].objectives.as_slice())
            .collect();
        let d = crowding_distance(&fo);
        for (&i, d) in front.iter().zip(d) {
            pop[i].rank = Some(r + 1);
            pop[i].crowding = d;
        }
    }
    fronts
}

/// Keeps the best `n` of `merged` by front, filling a partially taken front
/// in decreasing crowding order (earlier index first on ties).
pub fn select_survivors(mut merged: Population, n: usize) -> Population {
    let fronts = rank_and_crowd(&mut merged);
    let mut keep = Vec::with_capacity(n);
    for front in fronts {
        if keep.len() + front.len() <= n {
            keep.extend(front);
        } else {
            let mut f = front;
            f.sort_by(|&a, &b| {
                merged[b]
                    .crowding
                    .total_cmp(&merged[a].crowding)
                    .then(a.cmp(&b))
            });
            keep.extend(f.into_iter().take(n - keep.len()));
        }
        if keep.len() == n {
            break;
        }
    }
    let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
    keep.into_iter()
        .map(|i| slots[i].take().expect("survivor taken twice"))
        .collect()
}

fn evaluate_all<F>(
    genomes: Vec<Vec<f64>>,
    generation: usize,
    seeds: SeedStream,
    parallel: bool,
    eval: &F,
) -> Result<Population>
where
    F: Fn(&[f64], &mut Rng) -> Result<Vec<f64>> + Sync,
{
    let one = |(i, genes): (usize, Vec<f64>)| -> Result<Individual> {
        let mut rng = seeds.substream(Domain::Evaluation, generation as u64, i as u64);
        let objectives = eval(&genes, &mut rng).map_err(|e| Error::Evaluation {
            generation,
            individual: i,
            source: Box::new(e),
        })?;
        Ok(Individual::new(genes, objectives))
    };
    if parallel {
        genomes.into_par_iter().enumerate().map(one).collect()
    } else {
        genomes.into_iter().enumerate().map(one).collect()
    }
}

/// Runs NSGA-II from `initial` genomes.
///
/// Individual `i` of generation `g` (0 for the initial population) is
/// evaluated with the `(Evaluation, g, i)` substream, and generation `g`'s
/// selection and variation use `(Variation, g, 0)`, so serial and parallel
/// runs agree bit for bit.
pub fn evolve<F>(
    initial: Vec<Vec<f64>>,
    eval: F,
    config: &GaConfig,
    seeds: SeedStream,
) -> Result<Evolution>
where
    F: Fn(&[f64], &mut Rng) -> Result<Vec<f64>> + Sync,
{
    config.validate()?;
    if initial.len() != config.population_size {
        return Err(Error::invalid(format!(
            "initial population has {} genomes, population_size is {}",
            initial.len(),
            config.population_size
        )));
    }
    let len = initial[0].len();
    if initial.iter().any(|g| g.len() != len) {
        return Err(Error::invalid("initial genomes differ in length"));
    }
    config.bounds.validate(Some(len))?;
    let mutation_prob =
        config
            .mutation_prob
            .unwrap_or(if len == 0 { 0.0 } else { 1.0 / len as f64 });

    let mut population = evaluate_all(initial, 0, seeds, config.parallel, &eval)?;
    rank_and_crowd(&mut population);
    let mut evaluations = population.len();
    let mut history = vec![GenerationRecord {
        generation: 0,
        evaluations,
        population: population.clone(),
    }];

    for g in 1..=config.generations {
        let mut rng = seeds.substream(Domain::Variation, g as u64, 0);
        let mut children = Vec::with_capacity(config.offspring_size + 1);
        while children.len() < config.offspring_size {
            let a = tournament_select(&population, &mut rng);
            let b = tournament_select(&population, &mut rng);
            let (mut c1, mut c2) = sbx_crossover(
                &population[a].genes,
                &population[b].genes,
                config.crossover_eta,
                config.crossover_prob,
                &config.bounds,
                &mut rng,
            );
            polynomial_mutation(
                &mut c1,
                config.mutation_eta,
                mutation_prob,
                &config.bounds,
                &mut rng,
            );
            polynomial_mutation(
                &mut c2,
                config.mutation_eta,
                mutation_prob,
                &config.bounds,
                &mut rng,
            );
            children.push(c1);
            children.push(c2);
        }
        children.truncate(config.offspring_size);

        let offspring = evaluate_all(children, g, seeds, config.parallel, &eval)?;
        evaluations += offspring.len();
        let mut merged = population;
        merged.extend(offspring);
        population = select_survivors(merged, config.population_size);
        history.push(GenerationRecord {
            generation: g,
            evaluations,
            population: population.clone(),
        });
    }
    Ok(Evolution {
        population,
        history,
    })
}
