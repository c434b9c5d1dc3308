//! Exhaustive solution of the two-point, four-day instance and a look at one
//! optimal schedule's constraint report.

use movco::cmp::{CashSchedule, CmpInstance};
use movco::metrics::brute_force_solve;

fn main() -> movco::error::Result<()> {
    let inst = CmpInstance::worked_example();
    let oracle = brute_force_solve(&inst)?;
    println!(
        "{} qubits, {} feasible schedules, {} optimal, C_min = {}, C_max = {}",
        inst.n_bits(),
        oracle.feasible_count,
        oracle.optimal.len(),
        oracle.c_min,
        oracle.c_max
    );
    for s in oracle.optimal_schedules(&inst) {
        println!("  {:?} cost {}", s.rows(), inst.transaction_cost(&s));
    }

    let m = CashSchedule::from_matrix(&[vec![2, 2, 3, 0], vec![1, 1, 0, 1]])?;
    let report = inst.check_constraints(&m);
    println!("schedule {:?}: {:?}", m.rows(), report);
    println!("encoded as {}", m.encode());
    Ok(())
}
