//! Penalized VQE with SPSA and the penalized genetic search against MOVCO at
//! the same evaluation budget on a 16-qubit instance.

use movco::baselines::{run_penalty_ga, run_penalty_vqe, PenaltyConfig, SpsaConfig};
use movco::cmp::{generate_instance, Scorer};
use movco::metrics::{approximation_ratio, brute_force_solve, exact_expectation_state};
use movco::movco::{run_movco, MovcoConfig, RunResult};
use movco::nsga2::GaConfig;
use movco::rng::{Domain, SeedStream};

fn main() -> movco::error::Result<()> {
    let inst = generate_instance(
        2,
        4,
        &mut SeedStream::new(5).substream(Domain::Instance, 0, 0),
    )?;
    let scorer = Scorer::new(&inst);
    let oracle = brute_force_solve(&inst)?;
    let ga = GaConfig {
        generations: 199,
        ..GaConfig::default()
    };
    let penalty = PenaltyConfig::default();
    let runs: [(&str, RunResult); 3] = [
        (
            "movco",
            run_movco(
                &inst,
                &MovcoConfig {
                    ga: ga.clone(),
                    ..MovcoConfig::default()
                },
            )?,
        ),
        (
            "penalty-vqe",
            run_penalty_vqe(
                &inst,
                &penalty,
                &SpsaConfig {
                    iterations: 1000,
                    ..SpsaConfig::default()
                },
            )?,
        ),
        ("penalty-ga", run_penalty_ga(&inst, &penalty, &ga, 0)?),
    ];
    let sim = penalty.simulator();
    for (name, run) in &runs {
        let exp = exact_expectation_state(&sim.build_state(&run.best.params)?, &scorer);
        let ratio = approximation_ratio(exp.expected_cost, &inst, oracle.c_min)?;
        println!(
            "{name:12} evaluations {:5}  P {:.4}  expected cost {:7.3}  ratio {:.4}",
            run.records.last().unwrap().evaluations,
            exp.p,
            exp.expected_cost,
            ratio
        );
    }
    Ok(())
}
