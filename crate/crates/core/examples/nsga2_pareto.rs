//! The genetic engine on a two-objective toy problem: minimize `x^2` and
//! `(x - 2)^2`, whose Pareto set is `0 <= x <= 2`.

use movco::nsga2::{evolve, GaConfig, GeneBounds};
use movco::rng::SeedStream;

fn main() -> movco::error::Result<()> {
    let config = GaConfig {
        population_size: 20,
        offspring_size: 20,
        generations: 50,
        bounds: GeneBounds::Uniform {
            lower: -5.0,
            upper: 5.0,
        },
        ..GaConfig::default()
    };
    let initial: Vec<Vec<f64>> = (0..20).map(|i| vec![-5.0 + 0.5 * i as f64]).collect();
    let evo = evolve(
        initial,
        |g, _| Ok(vec![g[0] * g[0], (g[0] - 2.0).powi(2)]),
        &config,
        SeedStream::new(1),
    )?;
    let mut front: Vec<_> = evo
        .population
        .iter()
        .filter(|i| i.rank == Some(1))
        .collect();
    front.sort_by(|a, b| a.genes[0].total_cmp(&b.genes[0]));
    println!(
        "{} of {} individuals on the first front",
        front.len(),
        evo.population.len()
    );
    for ind in front {
        println!(
            "  x = {:+.4}  f = ({:.4}, {:.4})",
            ind.genes[0], ind.objectives[0], ind.objectives[1]
        );
    }
    Ok(())
}
