//! Ground truth and reported metrics: the exhaustive oracle, approximation
//! ratio, ground-state overlap, exact expectations and the comparison gaps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmp::{CashSchedule, CmpInstance, Scorer, LEVELS};
use crate::error::{Error, Result};
use crate::movco::{summarize_batch, ExpectationMode};
use crate::qsim::{cell_qubit, Ansatz, BitString, ParameterVector, Simulator, StateVector};
use crate::rng::Rng;

/// Largest register the oracle will enumerate.
pub const ORACLE_LIMIT: usize = 24;

/// Overlap strictly above this counts as success.
pub const SUCCESS_THRESHOLD: f64 = 0.1;

/// Basis states per enumeration chunk.
const CHUNK: u64 = 1 << 14;

/// Exhaustive solution of one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Minimum cost over the schedules that satisfy the most constraints.
    pub c_min: f64,
    pub c_max: f64,
    /// Basis indices of every minimizer, ascending.
    pub optimal: Vec<u64>,
    /// Schedules satisfying all `D + 1` constraints.
    pub feasible_count: u64,
    /// Most constraints any schedule satisfies.
    pub satisfiability_cap: usize,
    pub n_bits: usize,
}

impl OracleResult {
    pub fn optimal_schedules(&self, instance: &CmpInstance) -> Vec<CashSchedule> {
        self.optimal
            .iter()
            .map(|&x| CashSchedule::decode(&[x], self.n_bits, instance).expect("oracle register"))
            .collect()
    }

    pub fn optimal_bitstrings(&self) -> Vec<BitString> {
        self.optimal
            .iter()
            .map(|&x| BitString::from_index(x, self.n_bits))
            .collect()
    }

    /// Whether some schedule meets every constraint.
    pub fn satisfiable(&self) -> bool {
        self.feasible_count > 0
    }
}

#[derive(Clone, Debug)]
struct Partial {
    sat: u32,
    cost: f64,
    optimal: Vec<u64>,
    feasible: u64,
}

impl Partial {
    fn empty() -> Self {
        Partial {
            sat: 0,
            cost: f64::INFINITY,
            optimal: Vec::new(),
            feasible: 0,
        }
    }

    fn offer(&mut self, sat: u32, cost: f64, x: u64) {
        if sat > self.sat || (sat == self.sat && cost < self.cost) {
            self.sat = sat;
            self.cost = cost;
            self.optimal.clear();
            self.optimal.push(x);
        } else if sat == self.sat && cost == self.cost {
            self.optimal.push(x);
        }
    }

    /// Merges a later chunk, keeping index order.
    fn merge(mut self, other: Partial) -> Partial {
        self.feasible += other.feasible;
        if other.sat > self.sat || (other.sat == self.sat && other.cost < self.cost) {
            other.optimal.clone_into(&mut self.optimal);
            self.sat = other.sat;
            self.cost = other.cost;
        } else if other.sat == self.sat && other.cost == self.cost {
            self.optimal.extend(other.optimal);
        }
        self
    }
}

/// Enumerates all `2^V` schedules.
///
/// On satisfiable instances `c_min` is the minimum feasible cost; otherwise it
/// is taken over the schedules that reach the satisfiability cap.
pub fn brute_force_solve(instance: &CmpInstance) -> Result<OracleResult> {
    instance.validate()?;
    let n = instance.n_bits();
    if n > ORACLE_LIMIT {
        return Err(Error::ResourceLimit {
            what: "exhaustive search bits",
            requested: n,
            limit: ORACLE_LIMIT,
        });
    }
    let all = instance.constraint_count() as u32;
    let total = 1u64 << n;
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut p = Partial::empty();
            for x in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let s = crate::cmp::score_words(instance, &[x]);
                if s.satisfied == all {
                    p.feasible += 1;
                }
                p.offer(s.satisfied, s.cost, x);
            }
            p
        })
        .collect();
    let best = parts.into_iter().fold(Partial::empty(), Partial::merge);
    Ok(OracleResult {
        c_min: best.cost,
        c_max: instance.cost_upper_bound(),
        optimal: best.optimal,
        feasible_count: best.feasible,
        satisfiability_cap: best.sat as usize,
        n_bits: n,
    })
}

/// `(C_max - cost) / (C_max - C_min)`: 1 at the optimum, 0 at the most
/// expensive schedule, above 1 for cheap infeasible distributions.
pub fn approximation_ratio(expected_cost: f64, instance: &CmpInstance, c_min: f64) -> Result<f64> {
    let c_max = instance.cost_upper_bound();
    if c_max <= c_min {
        return Err(Error::InvalidState(format!(
            "approximation ratio undefined: C_max {c_max} <= C_min {c_min}"
        )));
    }
    Ok((c_max - expected_cost) / (c_max - c_min))
}

/// Total probability of the optimal schedules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    pub rho: f64,
    pub success: bool,
}

impl Overlap {
    pub fn new(rho: f64) -> Self {
        Self {
            rho,
            success: rho > SUCCESS_THRESHOLD,
        }
    }
}

/// Overlap of a dense state with the optima (basis indices).
pub fn success_overlap(state: &StateVector, optimal: &[u64]) -> Overlap {
    let amps = state.amplitudes();
    let rho: f64 = optimal
        .iter()
        .map(|&x| amps[x as usize] * amps[x as usize])
        .sum();
    Overlap::new(rho.min(1.0))
}

/// Overlap of a product ansatz with the optima, from per-qubit marginals.
pub fn success_overlap_product(params: &ParameterVector, optimal: &[BitString]) -> Result<Overlap> {
    let mut rho = 0.0;
    for bits in optimal {
        rho += crate::qsim::product_probability(params, bits)?;
    }
    Ok(Overlap::new(rho.min(1.0)))
}

/// Overlap of any ansatz with the oracle's optima.
pub fn overlap(
    params: &ParameterVector,
    sim: &Simulator,
    oracle: &OracleResult,
) -> Result<Overlap> {
    match params.ansatz() {
        Ansatz::Product => success_overlap_product(params, &oracle.optimal_bitstrings()),
        Ansatz::Layered { .. } => Ok(success_overlap(&sim.build_state(params)?, &oracle.optimal)),
    }
}

/// MOVCO-minus-baseline comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gaps {
    pub p_gap: f64,
    /// `None` when the baseline's expected cost is zero.
    pub c_gap: Option<f64>,
}

/// `P_gap = P_a - P_b` and `C_gap = (C_b - C_a) / C_b`, where `a` is MOVCO and
/// `b` the baseline; positive values favour `a`.
pub fn gaps(a: &Expectation, b: &Expectation) -> Gaps {
    Gaps {
        p_gap: a.p - b.p,
        c_gap: (b.expected_cost != 0.0)
            .then(|| (b.expected_cost - a.expected_cost) / b.expected_cost),
    }
}

/// `E / (C_max - C_min)`, mapping restricted energies onto `[-1, 0]`.
pub fn normalize_energy_trace(values: &[f64], instance: &CmpInstance, c_min: f64) -> Vec<f64> {
    let span = instance.cost_upper_bound() - c_min;
    values.iter().map(|e| e / span).collect()
}

/// Expectation values of one parameter vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    /// Mean constraint-satisfaction fraction.
    pub p: f64,
    /// Mean transaction cost over all outcomes.
    pub expected_cost: f64,
    /// Restricted energy; not available analytically for product states.
    pub energy: Option<f64>,
}

/// Exact expectations over a dense state.
pub fn exact_expectation_state(state: &StateVector, scorer: &Scorer) -> Expectation {
    let norm = scorer.normalizer();
    let (mut p, mut cost, mut energy) = (0.0, 0.0, 0.0);
    for (x, a) in state.amplitudes().iter().enumerate() {
        let w = a * a;
        if w == 0.0 {
            continue;
        }
        let s = scorer.score(&[x as u64]);
        p += w * s.satisfied.min(norm) as f64;
        cost += w * s.cost;
        if scorer.is_feasible(&s) {
            energy += w * (s.cost - scorer.cost_max());
        }
    }
    Expectation {
        p: p / norm as f64,
        expected_cost: cost,
        energy: Some(energy),
    }
}

/// Level distribution `P(M = m)`, `m = 0..4`, of one cell.
fn cell_distribution(marg: &[f64], c: usize, t: usize, days: usize) -> [f64; LEVELS as usize] {
    let p0 = marg[cell_qubit(c, t, 0, days)];
    let p1 = marg[cell_qubit(c, t, 1, days)];
    [
        (1.0 - p0) * (1.0 - p1),
        p0 * (1.0 - p1),
        (1.0 - p0) * p1,
        p0 * p1,
    ]
}

fn level_prob(dist: &[f64; LEVELS as usize], m: i64) -> f64 {
    if (0..LEVELS as i64).contains(&m) {
        dist[m as usize]
    } else {
        0.0
    }
}

/// Exact expectations of a product ansatz from its marginals.
///
/// Cells of one cash point are independent of every other cash point, so the
/// transaction indicators of one day are independent across cash points and
/// the daily count is Poisson-binomial. The satisfied-constraint count is
/// linear, which gives `P` exactly when the normalizer is the true
/// satisfiability cap (no outcome exceeds it).
pub fn exact_expectation_product(params: &ParameterVector, scorer: &Scorer) -> Result<Expectation> {
    if params.ansatz() != Ansatz::Product {
        return Err(Error::invalid(
            "analytic expectation needs a product ansatz",
        ));
    }
    let inst = scorer.instance();
    if params.n_qubits() != inst.n_bits() {
        return Err(Error::invalid(
            "ansatz register does not match the instance",
        ));
    }
    let (cs, days) = (inst.cash_points, inst.days);
    let marg = crate::qsim::marginals(params);
    let dist: Vec<Vec<[f64; 4]>> = (0..cs)
        .map(|c| {
            (0..days)
                .map(|t| cell_distribution(&marg, c, t, days))
                .collect()
        })
        .collect();

    let mut expected_cost = 0.0;
    let mut sat = 0.0;
    for t in 0..days {
        // count[j] = P(j transactions so far on day t)
        let mut count = vec![1.0];
        for c in 0..cs {
            let p = &inst.prediction[c];
            let stay = if t == 0 {
                level_prob(&dist[c][0], p[0])
            } else {
                (0..LEVELS as i64)
                    .map(|m| {
                        dist[c][t - 1][m as usize] * level_prob(&dist[c][t], p[t] + m - p[t - 1])
                    })
                    .sum()
            };
            let q = (1.0 - stay).clamp(0.0, 1.0);
            expected_cost += q * if t == 0 {
                inst.first_day_price[c]
            } else {
                inst.price[c]
            };
            let mut next = vec![0.0; count.len() + 1];
            for (j, w) in count.iter().enumerate() {
                next[j] += w * (1.0 - q);
                next[j + 1] += w * q;
            }
            count = next;
        }
        sat += count.iter().take(inst.daily_tx_limit + 1).sum::<f64>();
    }
    // Distribution of the final-day total.
    let mut total = vec![1.0];
    for d in dist.iter().map(|row| &row[days - 1]) {
        let mut next = vec![0.0; total.len() + LEVELS as usize - 1];
        for (s, w) in total.iter().enumerate() {
            for (m, pm) in d.iter().enumerate() {
                next[s + m] += w * pm;
            }
        }
        total = next;
    }
    let cap = inst.final_cash_cap;
    if cap >= 0 {
        sat += total.iter().take(cap as usize + 1).sum::<f64>();
    }
    let norm = scorer.normalizer() as f64;
    Ok(Expectation {
        p: (sat / norm).min(1.0),
        expected_cost,
        energy: None,
    })
}

/// Expectations of `params` by the requested mode. `Exact` uses the dense
/// state for layered ansätze and the analytic formulas for product ones;
/// `Sampled` scores a fresh `shots`-shot batch.
pub fn expectation(
    params: &ParameterVector,
    scorer: &Scorer,
    sim: &Simulator,
    mode: ExpectationMode,
    shots: usize,
    rng: &mut Rng,
) -> Result<Expectation> {
    match (mode, params.ansatz()) {
        (ExpectationMode::Exact, Ansatz::Product) => exact_expectation_product(params, scorer),
        (ExpectationMode::Exact, Ansatz::Layered { .. }) => {
            Ok(exact_expectation_state(&sim.build_state(params)?, scorer))
        }
        (ExpectationMode::Sampled, _) => {
            let batch = sim.sample(params, shots, rng)?;
            let s = summarize_batch(scorer, &batch);
            Ok(Expectation {
                p: s.fitness.p,
                expected_cost: s.mean_cost,
                energy: Some(s.fitness.e),
            })
        }
    }
}
