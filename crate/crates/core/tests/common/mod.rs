//! Statistical helpers shared by the integration tests and the acceptance
//! harness.
#![allow(dead_code)]

use movco::cmp::Scorer;
use movco::metrics::Expectation;
use movco::qsim::SampleBatch;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Pearson goodness-of-fit p-value of `counts` against `probs`. Cells with
/// expected count below 5 are pooled into one cell.
pub fn chi_square_p_value(counts: &[usize], probs: &[f64]) -> f64 {
    let shots: usize = counts.iter().sum();
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&o, &p) in counts.iter().zip(probs) {
        let e = p * shots as f64;
        if e < 5.0 {
            pooled_obs += o as f64;
            pooled_exp += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    if cells < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat)
}

/// Basis-state histogram of a batch on at most 64 qubits.
pub fn histogram(batch: &SampleBatch) -> Vec<usize> {
    let mut counts = vec![0usize; 1 << batch.n_bits()];
    for shot in batch.iter() {
        counts[shot[0] as usize] += 1;
    }
    counts
}

/// Largest deviation, in standard errors, between the exact expectations
/// and the per-shot sample means of the constraint fraction, the cost and
/// (when available) the restricted energy.
pub fn max_standard_errors(exact: &Expectation, scorer: &Scorer, batch: &SampleBatch) -> f64 {
    let norm = scorer.normalizer() as f64;
    let mut columns: [Vec<f64>; 3] = Default::default();
    for shot in batch.iter() {
        let s = scorer.score(shot);
        columns[0].push(s.satisfied.min(scorer.normalizer()) as f64 / norm);
        columns[1].push(s.cost);
        columns[2].push(if scorer.is_feasible(&s) {
            s.cost - scorer.cost_max()
        } else {
            0.0
        });
    }
    let targets = [Some(exact.p), Some(exact.expected_cost), exact.energy];
    // Magnitude bound of each column. One shot moves a mean by at most
    // `bound / n`, so the standard error is floored there: a mass too small
    // to show up in any shot cannot be resolved by the batch.
    let bounds = [1.0, scorer.cost_max(), scorer.cost_max()];
    columns
        .iter()
        .zip(targets)
        .zip(bounds)
        .filter_map(|((xs, target), bound)| {
            let target = target?;
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            let se = (var / n).sqrt().max(bound / n);
            Some((mean - target).abs() / se)
        })
        .fold(0.0, f64::max)
}
