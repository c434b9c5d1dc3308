//! Bit-level scoring of measured bitstrings.
//!
//! [`Scorer`] evaluates cost and constraint status straight from packed
//! words without building a [`super::CashSchedule`]. For registers of at most
//! [`TABLE_LIMIT`] bits it precomputes every basis state once, turning the
//! per-shot work of the optimizers into a table lookup. Larger registers with
//! horizons of at most [`ROW_TABLE_DAYS`] days use one table per cash point,
//! indexed by that cash point's `2D` contiguous bits.

use super::instance::CmpInstance;
use crate::qsim::{bit, cell_qubit};

/// Largest register for which a full score table is precomputed.
pub const TABLE_LIMIT: usize = 20;

/// Longest horizon for which per-cash-point tables are precomputed.
pub const ROW_TABLE_DAYS: usize = 7;

/// Cost and constraint status of one schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Score {
    pub cost: f64,
    pub final_ok: bool,
    /// Days whose transaction count exceeds the limit.
    pub days_over: u32,
    /// Satisfied constraints out of `D + 1`.
    pub satisfied: u32,
}

impl Score {
    pub fn penalized(&self, lambda_f: f64, lambda_l: f64) -> f64 {
        self.cost + if self.final_ok { 0.0 } else { lambda_f } + lambda_l * self.days_over as f64
    }
}

#[inline]
fn level(words: &[u64], c: usize, t: usize, days: usize) -> i64 {
    let b0 = bit(words, cell_qubit(c, t, 0, days)) as i64;
    let b1 = bit(words, cell_qubit(c, t, 1, days)) as i64;
    b0 + 2 * b1
}

/// Scores a packed bitstring of `2 C D` bits against an instance.
pub fn score_words(inst: &CmpInstance, words: &[u64]) -> Score {
    let (cs, days) = (inst.cash_points, inst.days);
    let mut cost = 0.0;
    let mut days_over = 0;
    for t in 0..days {
        let mut moves = 0;
        for c in 0..cs {
            let m = level(words, c, t, days);
            let p = &inst.prediction[c];
            let w = if t == 0 {
                p[0]
            } else {
                p[t] + level(words, c, t - 1, days) - p[t - 1]
            };
            if m != w {
                moves += 1;
                cost += if t == 0 {
                    inst.first_day_price[c]
                } else {
                    inst.price[c]
                };
            }
        }
        if moves > inst.daily_tx_limit {
            days_over += 1;
        }
    }
    let total: i64 = (0..cs).map(|c| level(words, c, days - 1, days)).sum();
    let final_ok = total <= inst.final_cash_cap;
    Score {
        cost,
        final_ok,
        days_over,
        satisfied: final_ok as u32 + (days as u32 - days_over),
    }
}

/// Contribution of one cash point's row of cells.
#[derive(Clone, Copy, Debug)]
struct RowEntry {
    cost: f64,
    /// Byte `t` is 1 when the row transacts on day `t`.
    tx: u64,
    last: u8,
}

#[derive(Clone, Debug)]
struct RowTables {
    days: usize,
    rows: Vec<Vec<RowEntry>>,
}

impl RowTables {
    fn build(inst: &CmpInstance) -> Option<Self> {
        let days = inst.days;
        // Per-day counts are summed bytewise, so they must fit in a byte.
        if days > ROW_TABLE_DAYS || inst.cash_points > u8::MAX as usize {
            return None;
        }
        let rows = (0..inst.cash_points)
            .map(|c| {
                let p = &inst.prediction[c];
                (0..1usize << (2 * days))
                    .map(|idx| {
                        let level = |t: usize| ((idx >> (2 * t)) & 3) as i64;
                        let mut cost = 0.0;
                        let mut tx = 0u64;
                        for t in 0..days {
                            let w = if t == 0 {
                                p[0]
                            } else {
                                p[t] + level(t - 1) - p[t - 1]
                            };
                            if level(t) != w {
                                cost += if t == 0 {
                                    inst.first_day_price[c]
                                } else {
                                    inst.price[c]
                                };
                                tx |= 1 << (8 * t);
                            }
                        }
                        RowEntry {
                            cost,
                            tx,
                            last: level(days - 1) as u8,
                        }
                    })
                    .collect()
            })
            .collect();
        Some(Self { days, rows })
    }

    #[inline]
    fn score(&self, inst: &CmpInstance, words: &[u64]) -> Score {
        let len = 2 * self.days;
        let mask = (1u64 << len) - 1;
        let mut cost = 0.0;
        let mut tx = 0u64;
        let mut total = 0i64;
        for (c, row) in self.rows.iter().enumerate() {
            let start = c * len;
            let (w, off) = (start >> 6, start & 63);
            let mut x = words[w] >> off;
            if off + len > 64 {
                x |= words[w + 1] << (64 - off);
            }
            let e = &row[(x & mask) as usize];
            cost += e.cost;
            tx += e.tx;
            total += e.last as i64;
        }
        let days_over = (0..self.days)
            .filter(|t| ((tx >> (8 * t)) & 0xff) as usize > inst.daily_tx_limit)
            .count() as u32;
        let final_ok = total <= inst.final_cash_cap;
        Score {
            cost,
            final_ok,
            days_over,
            satisfied: final_ok as u32 + (self.days as u32 - days_over),
        }
    }
}

/// Scoring context shared by the optimizers: the instance, the satisfaction
/// normalizer, the cost upper bound and (for small registers) a score table.
#[derive(Clone, Debug)]
pub struct Scorer {
    instance: CmpInstance,
    normalizer: u32,
    cost_max: f64,
    table: Option<Vec<Score>>,
    rows: Option<RowTables>,
}

impl Scorer {
    pub fn new(instance: &CmpInstance) -> Self {
        let n = instance.n_bits();
        let table = (n <= TABLE_LIMIT).then(|| {
            (0..1u64 << n)
                .map(|x| score_words(instance, &[x]))
                .collect()
        });
        let rows = if table.is_none() {
            RowTables::build(instance)
        } else {
            None
        };
        Self {
            instance: instance.clone(),
            normalizer: instance.normalizer() as u32,
            cost_max: instance.cost_upper_bound(),
            table,
            rows,
        }
    }

    pub fn instance(&self) -> &CmpInstance {
        &self.instance
    }

    pub fn n_bits(&self) -> usize {
        self.instance.n_bits()
    }

    /// Denominator of the per-shot satisfaction fraction.
    pub fn normalizer(&self) -> u32 {
        self.normalizer
    }

    pub fn cost_max(&self) -> f64 {
        self.cost_max
    }

    #[inline]
    pub fn score(&self, words: &[u64]) -> Score {
        match (&self.table, &self.rows) {
            (Some(t), _) => t[words[0] as usize],
            (None, Some(r)) => r.score(&self.instance, words),
            (None, None) => score_words(&self.instance, words),
        }
    }

    /// Whether a shot counts as feasible: it satisfies as many constraints as
    /// the normalizer (all `D + 1`, or the cap on unsatisfiable instances).
    #[inline]
    pub fn is_feasible(&self, s: &Score) -> bool {
        s.satisfied >= self.normalizer
    }

    #[inline]
    pub fn fraction(&self, s: &Score) -> f64 {
        (s.satisfied.min(self.normalizer)) as f64 / self.normalizer as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmp::schedule::CashSchedule;
    use crate::qsim::BitString;

    #[test]
    fn fast_path_matches_reference_on_worked_instance() {
        let inst = CmpInstance::worked_example();
        let scorer = Scorer::new(&inst);
        for x in (0..1u64 << 16).step_by(7) {
            let bits = BitString::from_index(x, 16);
            let s = CashSchedule::decode_bitstring(&bits, &inst).unwrap();
            let r = inst.check_constraints(&s);
            let fast = scorer.score(&[x]);
            assert_eq!(fast.cost, inst.transaction_cost(&s));
            assert_eq!(fast.satisfied as usize, r.satisfied_count);
            assert_eq!(fast.final_ok, r.final_total_ok);
            assert_eq!(
                fast.penalized(25.0, 25.0),
                inst.penalized_cost(&s, 25.0, 25.0)
            );
            assert_eq!(fast, score_words(&inst, &[x]));
        }
    }

    #[test]
    fn row_tables_match_reference() {
        use crate::cmp::generate_instance;
        use crate::rng::{Domain, SeedStream};
        use rand::Rng;
        let seeds = SeedStream::new(31);
        for (i, &(c, d)) in [(10, 7), (3, 5), (33, 2), (1, 7)].iter().enumerate() {
            let inst = generate_instance(c, d, &mut seeds.substream(Domain::Instance, i as u64, 0))
                .unwrap();
            let rows = RowTables::build(&inst).unwrap();
            let mut rng = seeds.substream(Domain::Evaluation, i as u64, 0);
            for _ in 0..2000 {
                let words: Vec<u64> = (0..inst.n_bits().div_ceil(64)).map(|_| rng.gen()).collect();
                assert_eq!(rows.score(&inst, &words), score_words(&inst, &words));
            }
        }
    }

    #[test]
    fn worked_optimum_scores_fourteen() {
        let inst = CmpInstance::worked_example();
        let s = CashSchedule::from_matrix(&[vec![2, 2, 3, 0], vec![1, 1, 0, 1]]).unwrap();
        let score = Scorer::new(&inst).score(s.encode().words());
        assert_eq!(score.cost, 14.0);
        assert_eq!(score.satisfied, 5);
    }
}
