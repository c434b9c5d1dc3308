//! Simulation of the variational ansatz: dense statevectors for the layered
//! rotation/CZ circuit and a per-qubit sampler for the separable ansatz.

pub mod bits;
pub mod params;
pub mod product;
pub mod statevector;

pub use bits::{bit, cell_qubit, spin, BitString, SampleBatch};
pub use params::{init_for, init_params, Ansatz, ParameterVector};
pub use product::{marginals, product_probability, sample_product};
pub use statevector::{sample_state, Simulator, StateVector, DEFAULT_STATEVECTOR_LIMIT};
