use rand::Rng;

use super::instance::{CmpInstance, LEVELS};
use super::score::score_words;
use crate::error::{Error, Result};

/// Largest register [`max_satisfiable`] will enumerate by default.
pub const DEFAULT_SEARCH_LIMIT: usize = 24;

/// Daily transaction limit used by the generator: 1 for two cash points,
/// otherwise `3C/4` rounded to the nearest integer (halves away from zero).
pub fn default_daily_limit(cash_points: usize) -> usize {
    if cash_points == 2 {
        1
    } else {
        (0.75 * cash_points as f64).round() as usize
    }
}

/// Random instance: regular prices uniform on `1..=4`, first-day prices
/// doubled, predictions uniform on `-2..=5`, final-day cap `C`.
///
/// Draw order: all `k[c]`, then `p` row by row.
pub fn generate_instance<R: Rng + ?Sized>(
    cash_points: usize,
    days: usize,
    rng: &mut R,
) -> Result<CmpInstance> {
    if cash_points == 0 || days == 0 {
        return Err(Error::invalid("C and D must be at least 1"));
    }
    let price: Vec<f64> = (0..cash_points)
        .map(|_| rng.gen_range(1..=4) as f64)
        .collect();
    let first_day_price = price.iter().map(|k| 2.0 * k).collect();
    let prediction = (0..cash_points)
        .map(|_| (0..days).map(|_| rng.gen_range(-2..=5)).collect())
        .collect();
    Ok(CmpInstance {
        cash_points,
        days,
        levels: LEVELS,
        first_day_price,
        price,
        prediction,
        final_cash_cap: cash_points as i64,
        daily_tx_limit: default_daily_limit(cash_points),
        seed: None,
        satisfiability_cap: None,
    })
}

/// Most constraints any schedule satisfies, by exhaustive enumeration.
pub fn max_satisfiable(inst: &CmpInstance, limit: usize) -> Result<usize> {
    let n = inst.n_bits();
    if n > limit {
        return Err(Error::ResourceLimit {
            what: "exhaustive search bits",
            requested: n,
            limit,
        });
    }
    let all = inst.constraint_count() as u32;
    let mut best = 0;
    for x in 0..1u64 << n {
        best = best.max(score_words(inst, &[x]).satisfied);
        if best == all {
            break;
        }
    }
    Ok(best as usize)
}
