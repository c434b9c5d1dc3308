//! Multi-objective variational constrained optimization (MOVCO) for the cash
//! management scheduling problem.
//!
//! The crate is organized bottom-up:
//!
//! * [`qsim`]: the variational ansatz (dense rotation/CZ statevector and the
//!   separable product sampler) and measurement batches;
//! * [`cmp`]: the cash management problem, its bit encoding, costs and
//!   constraints;
//! * [`nsga2`]: the multi-objective genetic engine;
//! * [`movco`]: the two fitness functions and the optimizer loop;
//! * [`baselines`]: penalty-based VQE with SPSA and the single-objective GA;
//! * [`metrics`]: brute-force oracle, approximation ratio, overlap and gaps;
//! * [`cli`]: the experiment harness behind the `movco` binary.
//!
//! Runnable walk-throughs live in this crate's `examples/` directory.

pub mod baselines;
pub mod cli;
pub mod cmp;
pub mod error;
pub mod metrics;
pub mod movco;
pub mod nsga2;
pub mod qsim;
pub mod rng;

pub use error::{Error, Result};
