//! MOVCO on a generated two-point, two-day instance, compared against the
//! exhaustive optimum.

use movco::cmp::generate_instance;
use movco::metrics::{approximation_ratio, brute_force_solve, exact_expectation_state, overlap};
use movco::movco::{run_movco, MovcoConfig};
use movco::nsga2::GaConfig;
use movco::rng::{Domain, SeedStream};

fn main() -> movco::error::Result<()> {
    let inst = generate_instance(
        2,
        2,
        &mut SeedStream::new(11).substream(Domain::Instance, 0, 0),
    )?;
    let oracle = brute_force_solve(&inst)?;
    let config = MovcoConfig {
        ga: GaConfig {
            generations: 150,
            ..GaConfig::default()
        },
        ..MovcoConfig::default()
    };
    let run = run_movco(&inst, &config)?;
    for r in run.records.iter().step_by(25) {
        println!(
            "generation {:3}  evaluations {:5}  best P {:.4}  best E {:.4}",
            r.step,
            r.evaluations,
            r.best_p.unwrap(),
            r.best_e.unwrap()
        );
    }
    let best = &run.best;
    println!(
        "target (1, {}); reached ({:.4}, {:.4})",
        oracle.c_min - oracle.c_max,
        best.fitness.p,
        best.fitness.e
    );
    let state = config.simulator().build_state(&best.params)?;
    let exp = exact_expectation_state(&state, &movco::cmp::Scorer::new(&inst));
    println!(
        "exact P {:.4}, approximation ratio {:.4}, overlap {:.4}",
        exp.p,
        approximation_ratio(exp.expected_cost, &inst, oracle.c_min)?,
        overlap(&best.params, &config.simulator(), &oracle)?.rho
    );
    if let Some(s) = &best.schedule {
        println!(
            "cheapest sampled feasible schedule {:?} at cost {}",
            s.rows(),
            best.schedule_cost.unwrap()
        );
    }
    Ok(())
}
