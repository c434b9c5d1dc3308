//! Simultaneous perturbation stochastic approximation.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Domain, Rng, SeedStream};

/// Gain schedule `a_k = a / (k + 1 + A)^alpha`, `c_k = c / (k + 1)^gamma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpsaConfig {
    pub iterations: usize,
    /// Step gain; `None` calibrates it from the first informative gradient
    /// estimate so that step moves each angle by `first_step`.
    pub a: Option<f64>,
    pub c: f64,
    /// Stability constant; `None` means `0.01 * iterations`.
    pub stability: Option<f64>,
    pub alpha: f64,
    pub gamma: f64,
    pub first_step: f64,
    pub seed: u64,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            iterations: 1000,
            a: None,
            c: 0.1,
            stability: None,
            alpha: 0.602,
            gamma: 0.101,
            first_step: 0.1,
            seed: 0,
        }
    }
}

impl SpsaConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if let Some(a) = self.a {
            if !(a > 0.0 && a.is_finite()) {
                errs.push(format!("a must be positive, got {a}"));
            }
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            errs.push(format!("c must be positive, got {}", self.c));
        }
        if !(self.first_step > 0.0 && self.first_step.is_finite()) {
            errs.push(format!(
                "first_step must be positive, got {}",
                self.first_step
            ));
        }
        if let Some(s) = self.stability {
            if !(s >= 0.0 && s.is_finite()) {
                errs.push(format!("stability must be non-negative, got {s}"));
            }
        }
        for (name, v) in [("alpha", self.alpha), ("gamma", self.gamma)] {
            if !(v > 0.0 && v <= 1.0) {
                errs.push(format!("{name} must lie in (0, 1], got {v}"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn stability_constant(&self) -> f64 {
        self.stability.unwrap_or(0.01 * self.iterations as f64)
    }
}

/// State after one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct SpsaStep {
    /// 1-based iteration.
    pub iteration: usize,
    /// Cumulative objective calls, `2 * iteration`.
    pub evaluations: usize,
    /// Mean of the two perturbed evaluations.
    pub value: f64,
    /// Parameters after the update.
    pub theta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpsaOutcome {
    pub theta: Vec<f64>,
    pub history: Vec<SpsaStep>,
    /// Step gain actually used.
    pub a: Option<f64>,
}

/// Minimizes a noisy objective with two evaluations per iteration.
///
/// Iteration `k` (0-based) draws a Rademacher direction from the
/// `(Perturbation, k)` substream and evaluates `theta + c_k delta` and
/// `theta - c_k delta` with the `(Evaluation, k, 0)` and `(Evaluation, k, 1)`
/// substreams. Parameters are not wrapped or clamped.
pub fn spsa_minimize<F>(
    mut objective: F,
    theta0: &[f64],
    config: &SpsaConfig,
) -> Result<SpsaOutcome>
where
    F: FnMut(&[f64], &mut Rng) -> Result<f64>,
{
    config.validate()?;
    let seeds = SeedStream::new(config.seed);
    let big_a = config.stability_constant();
    let mut a = config.a;
    let mut theta = theta0.to_vec();
    let mut history = Vec::with_capacity(config.iterations);
    let n = theta.len();
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];

    for k in 0..config.iterations {
        let kk = (k + 1) as f64;
        let ck = config.c / kk.powf(config.gamma);
        let mut prng = seeds.substream(Domain::Perturbation, k as u64, 0);
        let delta: Vec<f64> = (0..n)
            .map(|_| if prng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        for i in 0..n {
            plus[i] = theta[i] + ck * delta[i];
            minus[i] = theta[i] - ck * delta[i];
        }
        let eval = |f: &mut F, x: &[f64], side: u64| -> Result<f64> {
            let v = f(x, &mut seeds.substream(Domain::Evaluation, k as u64, side))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite {
                    iteration: k + 1,
                    value: v,
                })
            }
        };
        let fp = eval(&mut objective, &plus, 0)?;
        let fm = eval(&mut objective, &minus, 1)?;
        let diff = fp - fm;
        // Every gradient component has magnitude |diff| / (2 c_k).
        if a.is_none() && diff != 0.0 {
            let g = diff.abs() / (2.0 * ck);
            a = Some(config.first_step * (kk + big_a).powf(config.alpha) / g);
        }
        if let Some(a0) = a {
            let ak = a0 / (kk + big_a).powf(config.alpha);
            for i in 0..n {
                theta[i] -= ak * diff / (2.0 * ck * delta[i]);
            }
        }
        history.push(SpsaStep {
            iteration: k + 1,
            evaluations: 2 * (k + 1),
            value: 0.5 * (fp + fm),
            theta: theta.clone(),
        });
    }
    Ok(SpsaOutcome { theta, history, a })
}
