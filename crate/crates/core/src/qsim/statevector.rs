//! Dense statevector simulation of the rotation/CZ ansatz.
//!
//! Every gate in the ansatz is a real orthogonal matrix (`exp(i theta Y)` and
//! the diagonal CZ), so starting from `|0...0>` all amplitudes stay real and
//! are stored as `f64`.

use rand::Rng;

use super::bits::{BitString, SampleBatch};
use super::params::{Ansatz, ParameterVector};
use crate::error::{Error, Result};

/// Default maximum register size for dense simulation (2^24 amplitudes).
pub const DEFAULT_STATEVECTOR_LIMIT: usize = 24;

/// Allowed deviation of the squared norm from one before sampling refuses a
/// state.
pub const NORM_TOLERANCE: f64 = 1e-8;

/// Amplitudes of an `N`-qubit register. Basis index bit `q` is qubit `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<f64>,
}

impl StateVector {
    /// Wraps raw amplitudes. The length must be a power of two; the norm is
    /// not checked here.
    pub fn from_amplitudes(amps: Vec<f64>) -> Result<Self> {
        if amps.is_empty() || !amps.len().is_power_of_two() || amps.len() < 2 {
            return Err(Error::invalid(format!(
                "amplitude count {} is not a power of two >= 2",
                amps.len()
            )));
        }
        let n_qubits = amps.len().trailing_zeros() as usize;
        Ok(Self { n_qubits, amps })
    }

    /// The computational basis state `|bits>`.
    pub fn basis(bits: &BitString) -> Result<Self> {
        if bits.is_empty() || bits.len() > 30 {
            return Err(Error::invalid("basis state needs 1..=30 qubits"));
        }
        let mut amps = vec![0.0; 1 << bits.len()];
        amps[bits.index() as usize] = 1.0;
        Self::from_amplitudes(amps)
    }

    /// Equal superposition over all `2^n` basis states.
    pub fn uniform(n_qubits: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        Self::from_amplitudes(vec![(1.0 / dim as f64).sqrt(); dim])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a * a).sum()
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.amps.iter().map(|a| a * a)
    }

    /// `|<bits|psi>|^2`.
    pub fn basis_probability(&self, bits: &BitString) -> Result<f64> {
        if bits.len() != self.n_qubits {
            return Err(Error::invalid(format!(
                "bitstring has {} bits, state has {} qubits",
                bits.len(),
                self.n_qubits
            )));
        }
        let a = self.amps[bits.index() as usize];
        Ok(a * a)
    }

    /// `sum_x |psi(x)|^2 cost(x)`. The cost receives the basis index packed
    /// as a one-word bitstring.
    pub fn exact_expectation<F>(&self, mut cost: F) -> f64
    where
        F: FnMut(&[u64]) -> f64,
    {
        let mut acc = 0.0;
        for (x, a) in self.amps.iter().enumerate() {
            let p = a * a;
            if p > 0.0 {
                acc += p * cost(&[x as u64]);
            }
        }
        acc
    }

    /// Applies the nearest-neighbour CZ chain.
    pub fn apply_entangler(&mut self) {
        let n = self.n_qubits;
        if n < 2 {
            return;
        }
        let mask = (1usize << (n - 1)) - 1;
        for (x, a) in self.amps.iter_mut().enumerate() {
            if (x & (x >> 1) & mask).count_ones() & 1 == 1 {
                *a = -*a;
            }
        }
    }

    /// Applies `exp(i theta Y)` to qubit `q`: `|0> -> cos|0> - sin|1>`.
    pub fn apply_ry(&mut self, q: usize, theta: f64) {
        let (s, c) = theta.sin_cos();
        let stride = 1usize << q;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = c * x0 + s * x1;
                *a1 = c * x1 - s * x0;
            }
        }
    }
}

/// Builds `|0...0>` rotated by one product layer. `one_sign` is the sign of
/// the `|1>` amplitude (`-1` for `exp(i theta Y)`, `+1` for the product
/// ansatz's `cos|0> + sin|1>`).
fn product_layer(angles: &[f64], one_sign: f64) -> Vec<f64> {
    let mut amps = Vec::with_capacity(1 << angles.len());
    amps.push(1.0);
    for &theta in angles {
        let (s, c) = theta.sin_cos();
        let len = amps.len();
        amps.extend_from_within(..len);
        let (lo, hi) = amps.split_at_mut(len);
        for a in lo.iter_mut() {
            *a *= c;
        }
        for a in hi.iter_mut() {
            *a *= one_sign * s;
        }
    }
    amps
}

/// Dense simulator settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Simulator {
    pub statevector_limit: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Self {
            statevector_limit: DEFAULT_STATEVECTOR_LIMIT,
        }
    }
}

impl Simulator {
    pub fn with_limit(statevector_limit: usize) -> Self {
        Self { statevector_limit }
    }

    /// Whether a dense state of `n_qubits` fits the configured limit.
    pub fn fits(&self, n_qubits: usize) -> bool {
        n_qubits <= self.statevector_limit
    }

    /// `U(theta)|0...0>`.
    ///
    /// Layered: a first rotation layer, then for each `l = 1..=L` the CZ
    /// chain followed by rotation layer `l`. Product: the separable state
    /// `prod_n (cos theta_n |0> + sin theta_n |1>)`.
    pub fn build_state(&self, params: &ParameterVector) -> Result<StateVector> {
        let n = params.n_qubits();
        if n > self.statevector_limit {
            return Err(Error::ResourceLimit {
                what: "statevector qubits",
                requested: n,
                limit: self.statevector_limit,
            });
        }
        let state = match params.ansatz() {
            Ansatz::Product => StateVector {
                n_qubits: n,
                amps: product_layer(params.angles(), 1.0),
            },
            Ansatz::Layered { layers } => {
                let mut state = StateVector {
                    n_qubits: n,
                    amps: product_layer(params.layer(0), -1.0),
                };
                for l in 1..=layers {
                    state.apply_entangler();
                    for (q, &theta) in params.layer(l).iter().enumerate() {
                        state.apply_ry(q, theta);
                    }
                }
                state
            }
        };
        debug_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        Ok(state)
    }

    /// `K` measurement shots of the ansatz, using the dense simulator for the
    /// layered ansatz and the per-qubit sampler for the product ansatz.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        params: &ParameterVector,
        shots: usize,
        rng: &mut R,
    ) -> Result<SampleBatch> {
        match params.ansatz() {
            Ansatz::Product => super::product::sample_product(params, shots, rng),
            Ansatz::Layered { .. } => {
                let state = self.build_state(params)?;
                sample_state(&state, shots, rng)
            }
        }
    }
}

/// Draws `shots` independent computational-basis measurements.
pub fn sample_state<R: Rng + ?Sized>(
    state: &StateVector,
    shots: usize,
    rng: &mut R,
) -> Result<SampleBatch> {
    if shots == 0 {
        return Err(Error::invalid("shot count must be at least 1"));
    }
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
    }
    let mut cdf = Vec::with_capacity(state.amps.len());
    let mut acc = 0.0;
    for a in &state.amps {
        acc += a * a;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    let mut batch = SampleBatch::with_capacity(state.n_qubits, shots);
    for _ in 0..shots {
        let u = rng.gen::<f64>() * acc;
        let x = cdf.partition_point(|&c| c <= u).min(last);
        batch.push_words(&[x as u64]);
    }
    Ok(batch)
}
