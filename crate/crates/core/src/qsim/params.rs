use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width of the uniform jitter applied to freshly initialized angles.
pub const INIT_JITTER: f64 = 0.01;

/// Circuit family a [`ParameterVector`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ansatz {
    /// `L` entangling layers on top of an initial rotation layer:
    /// `N * (L + 1)` angles.
    Layered { layers: usize },
    /// Fully separable product of single-qubit rotations: `N` angles.
    Product,
}

impl Ansatz {
    pub fn parameter_count(&self, n_qubits: usize) -> usize {
        match *self {
            Ansatz::Layered { layers } => n_qubits * (layers + 1),
            Ansatz::Product => n_qubits,
        }
    }
}

/// Variational angles of one circuit.
///
/// Layered angles are stored layer-major: `theta(n, l)` lives at `l * N + n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterVector {
    n_qubits: usize,
    ansatz: Ansatz,
    angles: Vec<f64>,
}

impl ParameterVector {
    pub fn new(n_qubits: usize, ansatz: Ansatz, angles: Vec<f64>) -> Result<Self> {
        let pv = Self {
            n_qubits,
            ansatz,
            angles,
        };
        pv.validate()?;
        Ok(pv)
    }

    /// Checks the length and finiteness invariants.
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(Error::invalid("parameter vector needs at least one qubit"));
        }
        let expected = self.ansatz.parameter_count(self.n_qubits);
        if self.angles.len() != expected {
            return Err(Error::invalid(format!(
                "{:?} on {} qubits needs {} angles, got {}",
                self.ansatz,
                self.n_qubits,
                expected,
                self.angles.len()
            )));
        }
        if let Some(i) = self.angles.iter().position(|a| !a.is_finite()) {
            return Err(Error::invalid(format!("angle {i} is not finite")));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn ansatz(&self) -> Ansatz {
        self.ansatz
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn into_angles(self) -> Vec<f64> {
        self.angles
    }

    /// Angle of qubit `n` in layer `l` (product ansatz: `l` must be 0).
    pub fn theta(&self, n: usize, l: usize) -> f64 {
        self.angles[l * self.n_qubits + n]
    }

    /// Angles of one rotation layer.
    pub fn layer(&self, l: usize) -> &[f64] {
        &self.angles[l * self.n_qubits..(l + 1) * self.n_qubits]
    }

    /// Same shape, new angles.
    pub fn with_angles(&self, angles: Vec<f64>) -> Result<Self> {
        Self::new(self.n_qubits, self.ansatz, angles)
    }

    /// Probability of reading `1` on qubit `n` for a product ansatz.
    pub fn product_marginal(&self, n: usize) -> f64 {
        let s = self.angles[n].sin();
        s * s
    }
}

/// Initial angles for a layered ansatz: the first rotation layer sits near
/// `pi/4` (close to the uniform superposition), later layers near zero.
pub fn init_params<R: Rng + ?Sized>(
    n_qubits: usize,
    layers: usize,
    rng: &mut R,
) -> Result<ParameterVector> {
    init_for(Ansatz::Layered { layers }, n_qubits, rng)
}

/// Initial angles for any ansatz. The product ansatz is treated as a layered
/// one with zero entangling layers.
pub fn init_for<R: Rng + ?Sized>(
    ansatz: Ansatz,
    n_qubits: usize,
    rng: &mut R,
) -> Result<ParameterVector> {
    if n_qubits == 0 {
        return Err(Error::invalid("qubit count must be at least 1"));
    }
    let count = ansatz.parameter_count(n_qubits);
    let angles = (0..count)
        .map(|i| {
            let jitter = rng.gen_range(-INIT_JITTER..=INIT_JITTER);
            if i < n_qubits {
                FRAC_PI_4 + jitter
            } else {
                jitter
            }
        })
        .collect();
    ParameterVector::new(n_qubits, ansatz, angles)
}
