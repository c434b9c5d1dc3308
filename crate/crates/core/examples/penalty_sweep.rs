//! Feasibility and approximation ratio of penalized VQE across penalty
//! weights on a handful of 8-qubit instances.

use movco::baselines::{penalty_sweep, PenaltyConfig, SpsaConfig};
use movco::cmp::generate_instance;
use movco::rng::{Domain, SeedStream};

fn main() -> movco::error::Result<()> {
    let seeds = SeedStream::new(4);
    let instances = (0..5)
        .map(|i| generate_instance(2, 2, &mut seeds.substream(Domain::Instance, i, 0)))
        .collect::<movco::error::Result<Vec<_>>>()?;
    let rows = penalty_sweep(
        &instances,
        &[1.0, 5.0, 25.0, 100.0],
        &PenaltyConfig::default(),
        &SpsaConfig {
            iterations: 300,
            ..SpsaConfig::default()
        },
    )?;
    println!("lambda  feasible  mean ratio");
    for r in rows {
        println!(
            "{:6}  {:8.2}  {}",
            r.lambda,
            r.feasible_fraction,
            r.mean_approximation_ratio
                .map_or("-".into(), |v| format!("{v:.4}"))
        );
    }
    Ok(())
}
