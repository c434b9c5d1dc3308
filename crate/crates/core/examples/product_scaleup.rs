//! Separable ansatz on a ten-point, seven-day network (140 qubits), where no
//! statevector fits in memory. Reports the satisfaction and cost gaps.

use movco::baselines::{run_penalty_vqe_with, PenaltyConfig, SpsaConfig};
use movco::cmp::{generate_instance, Scorer};
use movco::metrics::{exact_expectation_product, gaps};
use movco::movco::{run_movco_with, MovcoConfig};
use movco::nsga2::GaConfig;
use movco::qsim::Ansatz;
use movco::rng::{Domain, SeedStream};

fn main() -> movco::error::Result<()> {
    let generations: usize = std::env::args()
        .nth(1)
        .map_or(20, |a| a.parse().expect("generation count"));
    let inst = generate_instance(
        10,
        7,
        &mut SeedStream::new(2).substream(Domain::Instance, 0, 0),
    )?;
    let scorer = Scorer::new(&inst);
    let config = MovcoConfig {
        ansatz: Ansatz::Product,
        ga: GaConfig {
            population_size: 100,
            offspring_size: 100,
            generations,
            ..GaConfig::default()
        },
        ..MovcoConfig::default()
    };
    let budget = config.ga.total_evaluations();
    let movco = run_movco_with(&scorer, &config)?;
    let penalty = PenaltyConfig {
        lambda_f: 50.0,
        lambda_l: 50.0,
        ansatz: Ansatz::Product,
        ..PenaltyConfig::default()
    };
    let vqe = run_penalty_vqe_with(
        &scorer,
        &penalty,
        &SpsaConfig {
            iterations: budget / 2,
            ..SpsaConfig::default()
        },
    )?;
    let a = exact_expectation_product(&movco.best.params, &scorer)?;
    let b = exact_expectation_product(&vqe.best.params, &scorer)?;
    println!("{} qubits, {budget} evaluations per method", inst.n_bits());
    println!(
        "movco:       P {:.4}  expected cost {:.2}",
        a.p, a.expected_cost
    );
    println!(
        "penalty-vqe: P {:.4}  expected cost {:.2}",
        b.p, b.expected_cost
    );
    println!("{:?}", gaps(&a, &b));
    Ok(())
}
