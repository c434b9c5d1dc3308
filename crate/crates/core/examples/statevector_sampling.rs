//! Layered ansatz on four qubits: exact probabilities against sampled
//! frequencies, and the separable ansatz sampled per qubit.

use movco::qsim::{init_params, Ansatz, ParameterVector, Simulator};
use movco::rng::{Domain, SeedStream};

fn main() -> movco::error::Result<()> {
    let seeds = SeedStream::new(3);
    let params = init_params(4, 1, &mut seeds.substream(Domain::Init, 0, 0))?;
    let sim = Simulator::default();
    let state = sim.build_state(&params)?;
    let shots = 8192;
    let batch = sim.sample(
        &params,
        shots,
        &mut seeds.substream(Domain::Evaluation, 0, 0),
    )?;
    let mut counts = vec![0usize; 16];
    for shot in batch.iter() {
        counts[shot[0] as usize] += 1;
    }
    println!("index  exact     sampled");
    for (x, p) in state.probabilities().enumerate() {
        println!("{x:5}  {p:.5}  {:.5}", counts[x] as f64 / shots as f64);
    }

    let product = ParameterVector::new(4, Ansatz::Product, vec![0.0, 0.3, 1.2, 1.5707963])?;
    let batch = sim.sample(
        &product,
        shots,
        &mut seeds.substream(Domain::Evaluation, 1, 0),
    )?;
    for q in 0..4 {
        println!(
            "qubit {q}: P(1) = {:.4}, sampled {:.4}",
            product.product_marginal(q),
            batch.frequency_of_one(q)
        );
    }
    Ok(())
}
