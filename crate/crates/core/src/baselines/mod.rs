//! Penalty-method comparison baselines.

pub mod penalty;
pub mod spsa;

pub use penalty::{
    penalized_mean, penalty_sweep, run_penalty_ga, run_penalty_ga_with, run_penalty_vqe,
    run_penalty_vqe_with, PenaltyConfig, SweepRow, FEASIBLE_P,
};
pub use spsa::{spsa_minimize, SpsaConfig, SpsaOutcome, SpsaStep};
