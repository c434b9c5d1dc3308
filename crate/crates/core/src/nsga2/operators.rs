//! Real-coded variation operators: binary tournament, simulated binary
//! crossover and polynomial mutation.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Genes closer than this are copied by crossover instead of spread.
const SBX_MIN_GAP: f64 = 1e-14;

/// Per-gene search bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneBounds {
    /// Every gene shares `[lower, upper]`.
    Uniform { lower: f64, upper: f64 },
    /// One `(lower, upper)` pair per gene.
    PerGene(Vec<(f64, f64)>),
}

impl GeneBounds {
    /// `[0, 2π]` for every rotation angle.
    pub fn angles() -> Self {
        GeneBounds::Uniform {
            lower: 0.0,
            upper: TAU,
        }
    }

    #[inline]
    pub fn get(&self, gene: usize) -> (f64, f64) {
        match self {
            GeneBounds::Uniform { lower, upper } => (*lower, *upper),
            GeneBounds::PerGene(b) => b[gene],
        }
    }

    pub fn validate(&self, genes: Option<usize>) -> Result<()> {
        let ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && lo <= hi;
        match self {
            GeneBounds::Uniform { lower, upper } => {
                if !ok((*lower, *upper)) {
                    return Err(Error::invalid(format!(
                        "bad gene bounds [{lower}, {upper}]"
                    )));
                }
            }
            GeneBounds::PerGene(b) => {
                if let Some(i) = b.iter().position(|&p| !ok(p)) {
                    return Err(Error::invalid(format!(
                        "bad bounds for gene {i}: {:?}",
                        b[i]
                    )));
                }
                if let Some(n) = genes {
                    if b.len() != n {
                        return Err(Error::invalid(format!(
                            "{} gene bounds for genomes of length {n}",
                            b.len()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn clamp(&self, gene: usize, x: f64) -> f64 {
        let (lo, hi) = self.get(gene);
        x.clamp(lo, hi)
    }
}

/// Rank and crowding of a tournament contestant. Rank 1 is the first front.
pub trait Ranked {
    fn rank(&self) -> usize;
    fn crowding(&self) -> f64;
}

/// Binary tournament: two distinct contestants; lower rank wins, then larger
/// crowding, then a fair coin.
pub fn tournament_select<T: Ranked, R: Rng + ?Sized>(population: &[T], rng: &mut R) -> usize {
    let n = population.len();
    assert!(n > 0, "tournament on an empty population");
    if n == 1 {
        return 0;
    }
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let (pa, pb) = (&population[a], &population[b]);
    if pa.rank() != pb.rank() {
        return if pa.rank() < pb.rank() { a } else { b };
    }
    if pa.crowding() != pb.crowding() {
        return if pa.crowding() > pb.crowding() { a } else { b };
    }
    if rng.gen_bool(0.5) {
        a
    } else {
        b
    }
}

/// Spread factor for the uniform draw `u ∈ [0, 1)`.
#[inline]
pub fn sbx_beta(u: f64, eta: f64) -> f64 {
    let e = 1.0 / (eta + 1.0);
    if u <= 0.5 {
        (2.0 * u).powf(e)
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(e)
    }
}

/// Unclamped SBX children of one gene pair.
#[inline]
pub fn sbx_pair(p1: f64, p2: f64, u: f64, eta: f64) -> (f64, f64) {
    let beta = sbx_beta(u, eta);
    (
        0.5 * ((1.0 + beta) * p1 + (1.0 - beta) * p2),
        0.5 * ((1.0 - beta) * p1 + (1.0 + beta) * p2),
    )
}

/// Simulated binary crossover applied gene by gene with probability `prob`.
/// Children are clamped to the bounds.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &[f64],
    p2: &[f64],
    eta: f64,
    prob: f64,
    bounds: &GeneBounds,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(p1.len(), p2.len(), "parents differ in length");
    let mut c1 = p1.to_vec();
    let mut c2 = p2.to_vec();
    for i in 0..p1.len() {
        if !rng.gen_bool(prob) {
            continue;
        }
        let u: f64 = rng.gen();
        if (p1[i] - p2[i]).abs() < SBX_MIN_GAP {
            continue;
        }
        let (a, b) = sbx_pair(p1[i], p2[i], u, eta);
        c1[i] = bounds.clamp(i, a);
        c2[i] = bounds.clamp(i, b);
    }
    (c1, c2)
}

/// Bounded polynomial mutation of one gene for the uniform draw `u`.
///
/// `u = 0.5` leaves the gene unchanged; the perturbation never leaves
/// `[lower, upper]` before the final clamp, which only absorbs rounding.
pub fn polynomial_mutate_gene(y: f64, lower: f64, upper: f64, u: f64, eta: f64) -> f64 {
    let span = upper - lower;
    if span <= 0.0 {
        return lower;
    }
    let d1 = (y - lower) / span;
    let d2 = (upper - y) / span;
    let power = 1.0 / (eta + 1.0);
    let dq = if u < 0.5 {
        let xy = 1.0 - d1;
        let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
        val.powf(power) - 1.0
    } else if u > 0.5 {
        let xy = 1.0 - d2;
        let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
        1.0 - val.powf(power)
    } else {
        0.0
    };
    (y + dq * span).clamp(lower, upper)
}

/// Polynomial mutation of each gene with probability `prob`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    genome: &mut [f64],
    eta: f64,
    prob: f64,
    bounds: &GeneBounds,
    rng: &mut R,
) {
    for (i, g) in genome.iter_mut().enumerate() {
        if !rng.gen_bool(prob) {
            continue;
        }
        let u: f64 = rng.gen();
        let (lo, hi) = bounds.get(i);
        *g = polynomial_mutate_gene(*g, lo, hi, u, eta);
    }
}
