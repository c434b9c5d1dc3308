//! Cash schedules, their bit encoding, cost and constraint checks.
//!
//! These are the readable reference routines. [`super::score`] has the
//! allocation-free bit-level path used inside the optimizers.

use super::instance::CmpInstance;
use crate::error::{Error, Result};
use crate::qsim::{bit, cell_qubit, BitString};

/// Normalized cash level `M[c][t]` in `0..=3` for every cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CashSchedule {
    cash_points: usize,
    days: usize,
    cells: Vec<u8>,
}

impl CashSchedule {
    pub fn from_matrix(rows: &[Vec<u8>]) -> Result<Self> {
        let days = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || days == 0 || rows.iter().any(|r| r.len() != days) {
            return Err(Error::invalid(
                "schedule must be a non-empty rectangular matrix",
            ));
        }
        if rows.iter().flatten().any(|&m| m > 3) {
            return Err(Error::invalid("schedule levels must lie in 0..=3"));
        }
        Ok(Self {
            cash_points: rows.len(),
            days,
            cells: rows.concat(),
        })
    }

    /// `M = b0 + 2 b1` per cell, reading the two qubits of the cell.
    pub fn decode(words: &[u64], n_bits: usize, instance: &CmpInstance) -> Result<Self> {
        if n_bits != instance.n_bits() {
            return Err(Error::invalid(format!(
                "expected {} bits, got {n_bits}",
                instance.n_bits()
            )));
        }
        Ok(Self::decode_unchecked(
            words,
            instance.cash_points,
            instance.days,
        ))
    }

    pub(crate) fn decode_unchecked(words: &[u64], cash_points: usize, days: usize) -> Self {
        let mut cells = Vec::with_capacity(cash_points * days);
        for c in 0..cash_points {
            for t in 0..days {
                let b0 = bit(words, cell_qubit(c, t, 0, days)) as u8;
                let b1 = bit(words, cell_qubit(c, t, 1, days)) as u8;
                cells.push(b0 + 2 * b1);
            }
        }
        Self {
            cash_points,
            days,
            cells,
        }
    }

    pub fn decode_bitstring(bits: &BitString, instance: &CmpInstance) -> Result<Self> {
        Self::decode(bits.words(), bits.len(), instance)
    }

    /// Inverse of [`decode`](Self::decode).
    pub fn encode(&self) -> BitString {
        let mut out = BitString::zeros(2 * self.cash_points * self.days);
        for c in 0..self.cash_points {
            for t in 0..self.days {
                let m = self.get(c, t);
                out.set(cell_qubit(c, t, 0, self.days), m & 1 == 1);
                out.set(cell_qubit(c, t, 1, self.days), m & 2 == 2);
            }
        }
        out
    }

    pub fn cash_points(&self) -> usize {
        self.cash_points
    }

    pub fn days(&self) -> usize {
        self.days
    }

    pub fn get(&self, c: usize, t: usize) -> u8 {
        self.cells[c * self.days + t]
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        self.cells.chunks(self.days).map(<[u8]>::to_vec).collect()
    }

    /// Spin pair `(z0, z1)` of one cell.
    pub fn spins(&self, c: usize, t: usize) -> (i8, i8) {
        let m = self.get(c, t);
        let z = |b: u8| if b != 0 { 1 } else { -1 };
        (z(m & 1), z(m & 2))
    }
}

/// Outcome of checking a schedule against the hard constraints.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport {
    pub final_total_ok: bool,
    pub daily_tx_ok: Vec<bool>,
    pub satisfied_count: usize,
    pub total: usize,
    pub fraction: f64,
}

impl CmpInstance {
    fn check_shape(&self, s: &CashSchedule) {
        assert_eq!(
            (s.cash_points, s.days),
            (self.cash_points, self.days),
            "schedule shape does not match instance"
        );
    }

    /// `W[c][t]`: the cash cell `(c, t)` would hold with no transaction that
    /// day, given the schedule on the previous day.
    pub fn no_transaction_cash(&self, s: &CashSchedule) -> Vec<Vec<i64>> {
        self.check_shape(s);
        (0..self.cash_points)
            .map(|c| {
                let p = &self.prediction[c];
                (0..self.days)
                    .map(|t| {
                        if t == 0 {
                            p[0]
                        } else {
                            p[t] + (s.get(c, t - 1) as i64 - p[t - 1])
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Whether a transaction happens in each cell.
    pub fn transactions(&self, s: &CashSchedule) -> Vec<Vec<bool>> {
        let w = self.no_transaction_cash(s);
        (0..self.cash_points)
            .map(|c| {
                (0..self.days)
                    .map(|t| s.get(c, t) as i64 != w[c][t])
                    .collect()
            })
            .collect()
    }

    /// Number of transactions on each day.
    pub fn daily_transactions(&self, s: &CashSchedule) -> Vec<usize> {
        let tx = self.transactions(s);
        (0..self.days)
            .map(|t| tx.iter().filter(|row| row[t]).count())
            .collect()
    }

    /// Sum of first-day prices for day-0 transactions plus regular prices
    /// for later ones.
    pub fn transaction_cost(&self, s: &CashSchedule) -> f64 {
        let tx = self.transactions(s);
        let mut cost = 0.0;
        for (c, row) in tx.iter().enumerate() {
            for (t, &moved) in row.iter().enumerate() {
                if moved {
                    cost += if t == 0 {
                        self.first_day_price[c]
                    } else {
                        self.price[c]
                    };
                }
            }
        }
        cost
    }

    pub fn final_total(&self, s: &CashSchedule) -> i64 {
        (0..self.cash_points)
            .map(|c| s.get(c, self.days - 1) as i64)
            .sum()
    }

    /// Checks the final-day cash cap and the per-day transaction limits. The
    /// fraction is taken over [`CmpInstance::normalizer`].
    pub fn check_constraints(&self, s: &CashSchedule) -> ConstraintReport {
        let final_total_ok = self.final_total(s) <= self.final_cash_cap;
        let daily_tx_ok: Vec<bool> = self
            .daily_transactions(s)
            .into_iter()
            .map(|n| n <= self.daily_tx_limit)
            .collect();
        let satisfied_count =
            final_total_ok as usize + daily_tx_ok.iter().filter(|&&ok| ok).count();
        ConstraintReport {
            final_total_ok,
            daily_tx_ok,
            satisfied_count,
            total: self.constraint_count(),
            fraction: satisfied_count as f64 / self.normalizer() as f64,
        }
    }

    /// Transaction cost plus `lambda_f` if the final total exceeds its cap
    /// and `lambda_l` per day over the transaction limit. Boundary values
    /// (total equal to the cap, count equal to the limit) are not penalized.
    pub fn penalized_cost(&self, s: &CashSchedule, lambda_f: f64, lambda_l: f64) -> f64 {
        let over_days = self
            .daily_transactions(s)
            .into_iter()
            .filter(|&n| n > self.daily_tx_limit)
            .count();
        let final_over = self.final_total(s) > self.final_cash_cap;
        self.transaction_cost(s) + lambda_f * final_over as u8 as f64 + lambda_l * over_days as f64
    }
}
