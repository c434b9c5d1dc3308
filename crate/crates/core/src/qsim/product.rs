//! Sampling the fully separable ansatz without a dense state.
//!
//! Qubit `n` reads `1` with probability `sin^2 theta_n`, independently of the
//! others, so no `2^N` object is ever built.

use rand::Rng;

use super::bits::{BitString, SampleBatch};
use super::params::{Ansatz, ParameterVector};
use crate::error::{Error, Result};

const SCALE: f64 = 4_294_967_296.0; // 2^32

/// Largest rare-outcome probability sampled by geometric skipping.
pub const SPARSE_LIMIT: f64 = 0.125;

/// Per-qubit `P(bit = 1)` of a product ansatz.
pub fn marginals(params: &ParameterVector) -> Vec<f64> {
    (0..params.n_qubits())
        .map(|n| params.product_marginal(n))
        .collect()
}

/// Probability of one bitstring under a product ansatz.
pub fn product_probability(params: &ParameterVector, bits: &BitString) -> Result<f64> {
    if bits.len() != params.n_qubits() {
        return Err(Error::invalid(
            "bitstring length does not match qubit count",
        ));
    }
    Ok((0..bits.len())
        .map(|n| {
            let p1 = params.product_marginal(n);
            if bits.get(n) {
                p1
            } else {
                1.0 - p1
            }
        })
        .product())
}

/// Draws `shots` bitstrings from the product ansatz.
///
/// A qubit whose rarer outcome has probability above [`SPARSE_LIMIT`] is
/// sampled per shot: its 32-bit draw is compared against
/// `round(sin^2 theta * 2^32)`. Every other qubit starts at its likely value
/// and the shots carrying its rare value are found by geometric skipping, so
/// near-deterministic qubits cost draws only for their rare outcomes.
/// `theta = 0` and `pi/2` give deterministic bits.
///
/// Draw order: one block per shot (the whole register when most qubits are
/// dense, otherwise only the dense ones), then the sparse qubits in
/// ascending order.
pub fn sample_product<R: Rng + ?Sized>(
    params: &ParameterVector,
    shots: usize,
    rng: &mut R,
) -> Result<SampleBatch> {
    if params.ansatz() != Ansatz::Product {
        return Err(Error::invalid("sample_product needs a product ansatz"));
    }
    if shots == 0 {
        return Err(Error::invalid("shot count must be at least 1"));
    }
    let n = params.n_qubits();
    let wps = super::bits::words_for(n);
    let mut base = vec![0u64; wps];
    let mut dense = Vec::new();
    let mut thresholds = Vec::new();
    let mut sparse = Vec::new();
    for (q, p) in marginals(params).into_iter().enumerate() {
        let rare = p.min(1.0 - p);
        if rare > SPARSE_LIMIT {
            dense.push(q);
            // Dense probabilities lie strictly inside (0, 1), so this fits.
            thresholds.push((p * SCALE).round() as u32);
        } else {
            if p > 0.5 {
                base[q >> 6] |= 1 << (q & 63);
            }
            if rare > 0.0 {
                sparse.push((q, rare));
            }
        }
    }

    let mut data: Vec<u64> = base.iter().copied().cycle().take(shots * wps).collect();
    if dense.len() * 2 > n {
        // Mostly dense: draw the whole register and pack 64 compares at a
        // time. Sparse qubits get threshold 0 and never fire here.
        let mut full = vec![0u32; n];
        for (&q, &t) in dense.iter().zip(&thresholds) {
            full[q] = t;
        }
        let mut draws = vec![0u32; n];
        for shot in data.chunks_exact_mut(wps) {
            rng.fill(&mut draws[..]);
            for (w, (d, t)) in shot.iter_mut().zip(draws.chunks(64).zip(full.chunks(64))) {
                let mut m = 0u64;
                for j in 0..d.len() {
                    m |= ((d[j] < t[j]) as u64) << j;
                }
                *w |= m;
            }
        }
    } else if !dense.is_empty() {
        let mut draws = vec![0u32; dense.len()];
        for shot in data.chunks_exact_mut(wps) {
            rng.fill(&mut draws[..]);
            for ((&q, &t), &d) in dense.iter().zip(&thresholds).zip(&draws) {
                shot[q >> 6] |= ((d < t) as u64) << (q & 63);
            }
        }
    }
    for (q, rare) in sparse {
        let log_keep = (-rare).ln_1p();
        let mut k = 0usize;
        loop {
            let u = 1.0 - rng.gen::<f64>();
            let gap = (u.ln() / log_keep).floor();
            if gap >= (shots - k) as f64 {
                break;
            }
            k += gap as usize;
            data[k * wps + (q >> 6)] ^= 1 << (q & 63);
            k += 1;
        }
    }
    Ok(SampleBatch::from_raw(n, data))
}
