use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of discrete cash levels per cell. Two bits encode one cell.
pub const LEVELS: u32 = 4;
/// Lowest normalized cash level.
pub const V_LOW: i64 = 0;
/// Highest normalized cash level.
pub const V_HIGH: i64 = LEVELS as i64 - 1;

/// Fixed data of one cash management instance.
///
/// Cash amounts are in normalized units: a cell holds a level in
/// `V_LOW..=V_HIGH`, while predictions may lie anywhere on the integer line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmpInstance {
    /// Number of cash points.
    #[serde(rename = "C")]
    pub cash_points: usize,
    /// Number of days in the planning horizon.
    #[serde(rename = "D")]
    pub days: usize,
    #[serde(rename = "h")]
    pub levels: u32,
    /// Transaction price on the first day, per cash point.
    #[serde(rename = "k0")]
    pub first_day_price: Vec<f64>,
    /// Transaction price on every later day, per cash point.
    #[serde(rename = "k")]
    pub price: Vec<f64>,
    /// Predicted cash `p[c][t]` if nothing is shipped or withdrawn.
    #[serde(rename = "p")]
    pub prediction: Vec<Vec<i64>>,
    /// Cap on the network's total cash on the last day.
    #[serde(rename = "v_f")]
    pub final_cash_cap: i64,
    /// Cap on the number of transactions per day across the network.
    #[serde(rename = "l")]
    pub daily_tx_limit: usize,
    /// Seed the instance was generated from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Largest number of constraints any schedule satisfies, when that is
    /// below `D + 1` (or has been computed).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisfiability_cap: Option<usize>,
}

impl CmpInstance {
    /// Two cash points over four days with a known optimal schedule of cost 14.
    pub fn worked_example() -> Self {
        Self {
            cash_points: 2,
            days: 4,
            levels: LEVELS,
            first_day_price: vec![4.0, 8.0],
            price: vec![2.0, 4.0],
            prediction: vec![vec![2, 2, 3, 1], vec![-2, 4, 3, 4]],
            final_cash_cap: 1,
            daily_tx_limit: 1,
            seed: None,
            satisfiability_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.cash_points == 0 {
            problems.push("C must be at least 1".to_string());
        }
        if self.days == 0 {
            problems.push("D must be at least 1".to_string());
        }
        if self.levels != LEVELS {
            problems.push(format!("h must be {LEVELS}, got {}", self.levels));
        }
        if self.first_day_price.len() != self.cash_points || self.price.len() != self.cash_points {
            problems.push("k0 and k need one entry per cash point".to_string());
        } else {
            for (c, (&k0, &k)) in self.first_day_price.iter().zip(&self.price).enumerate() {
                if !(k > 0.0 && k.is_finite() && k0.is_finite() && k < k0) {
                    problems.push(format!(
                        "cash point {c}: need 0 < k < k0, got k={k}, k0={k0}"
                    ));
                }
            }
        }
        if self.prediction.len() != self.cash_points
            || self.prediction.iter().any(|r| r.len() != self.days)
        {
            problems.push(format!(
                "p must be a {}x{} matrix",
                self.cash_points, self.days
            ));
        }
        if self.final_cash_cap < 0 {
            problems.push("v_f must be non-negative".to_string());
        }
        if let Some(cap) = self.satisfiability_cap {
            if cap > self.constraint_count() {
                problems.push(format!("satisfiability cap {cap} exceeds D+1"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Number of binary variables (qubits): two per cell.
    pub fn n_bits(&self) -> usize {
        2 * self.cash_points * self.days
    }

    /// Number of hard constraints: one final-day total plus one per day.
    pub fn constraint_count(&self) -> usize {
        self.days + 1
    }

    /// Denominator of the per-sample satisfaction fraction: the
    /// satisfiability cap when known, otherwise `D + 1`.
    pub fn normalizer(&self) -> usize {
        self.satisfiability_cap.unwrap_or(self.constraint_count())
    }

    /// Largest possible transaction cost: every cell transacts.
    pub fn cost_upper_bound(&self) -> f64 {
        let first: f64 = self.first_day_price.iter().sum();
        let later: f64 = self.price.iter().sum();
        first + (self.days as f64 - 1.0) * later
    }
}
