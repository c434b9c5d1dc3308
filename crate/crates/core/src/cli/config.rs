//! Experiment configuration shared by every subcommand.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::baselines::{PenaltyConfig, SpsaConfig};
use crate::error::{Error, Result};
use crate::movco::{ExpectationMode, MovcoConfig};
use crate::nsga2::GaConfig;
use crate::qsim::{Ansatz, DEFAULT_STATEVECTOR_LIMIT};

/// Optimizer driven by `run` and `compare`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Movco,
    PenaltyVqe,
    PenaltyGa,
    Brute,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Movco => "movco",
            Method::PenaltyVqe => "penalty-vqe",
            Method::PenaltyGa => "penalty-ga",
            Method::Brute => "brute",
        }
    }
}

/// Random instances to generate in place of an instance file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationSpec {
    pub cash_points: usize,
    pub days: usize,
    pub count: usize,
    pub seed: u64,
}

/// Fully resolved experiment. Every result file embeds one, so a run can be
/// replayed from its own output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub method: Method,
    /// Instance document to solve. Exclusive with `generate`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<PathBuf>,
    /// Instances generated on the fly. Exclusive with `instance`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generate: Option<GenerationSpec>,
    pub ansatz: Ansatz,
    pub shots: usize,
    pub population: usize,
    pub offspring: usize,
    /// Genetic generations for `movco` and `penalty-ga`.
    pub generations: usize,
    /// SPSA iterations for `penalty-vqe`.
    pub iterations: usize,
    pub lambda_f: f64,
    pub lambda_l: f64,
    pub seed: u64,
    /// Evaluate each generation's offspring in parallel.
    pub parallel: bool,
    pub expectation: ExpectationMode,
    pub statevector_limit: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            method: Method::Movco,
            instance: None,
            generate: None,
            ansatz: Ansatz::Layered { layers: 1 },
            shots: 8192,
            population: 10,
            offspring: 10,
            generations: 100,
            iterations: 1000,
            lambda_f: 25.0,
            lambda_l: 25.0,
            seed: 0,
            parallel: false,
            expectation: ExpectationMode::Exact,
            statevector_limit: DEFAULT_STATEVECTOR_LIMIT,
        }
    }
}

impl ExperimentConfig {
    /// Checks every field and reports all violations at once.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        match (&self.instance, &self.generate) {
            (None, None) => errs.push("one of instance or generate is required".to_string()),
            (Some(_), Some(_)) => {
                errs.push("instance and generate are mutually exclusive".to_string())
            }
            (Some(path), None) if !path.is_file() => {
                errs.push(format!("instance file {} does not exist", path.display()))
            }
            _ => {}
        }
        if let Some(g) = &self.generate {
            if g.cash_points == 0 {
                errs.push("generate.cash_points must be at least 1".into());
            }
            if g.days == 0 {
                errs.push("generate.days must be at least 1".into());
            }
            if g.count == 0 {
                errs.push("generate.count must be at least 1".into());
            }
        }
        if self.shots == 0 {
            errs.push("shots must be at least 1".into());
        }
        if matches!(self.method, Method::Movco | Method::PenaltyGa) {
            if self.population < 2 {
                errs.push(format!(
                    "population must be at least 2, got {}",
                    self.population
                ));
            }
            if self.offspring == 0 {
                errs.push("offspring must be at least 1".into());
            }
        }
        for (name, v) in [("lambda_f", self.lambda_f), ("lambda_l", self.lambda_l)] {
            if !(v >= 0.0 && v.is_finite()) {
                errs.push(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        if let Ansatz::Layered { layers } = self.ansatz {
            if layers == 0 {
                errs.push("layered ansatz needs at least one layer".into());
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn ga(&self) -> GaConfig {
        GaConfig {
            population_size: self.population,
            offspring_size: self.offspring,
            generations: self.generations,
            parallel: self.parallel,
            ..GaConfig::default()
        }
    }

    /// MOVCO settings with the given run seed.
    pub fn movco(&self, seed: u64) -> MovcoConfig {
        MovcoConfig {
            ansatz: self.ansatz,
            shots: self.shots,
            ga: self.ga(),
            seed,
            expectation: self.expectation,
            statevector_limit: self.statevector_limit,
        }
    }

    pub fn penalty(&self) -> PenaltyConfig {
        PenaltyConfig {
            lambda_f: self.lambda_f,
            lambda_l: self.lambda_l,
            shots: self.shots,
            ansatz: self.ansatz,
            statevector_limit: self.statevector_limit,
        }
    }

    /// SPSA settings with the given run seed.
    pub fn spsa(&self, seed: u64) -> SpsaConfig {
        SpsaConfig {
            iterations: self.iterations,
            seed,
            ..SpsaConfig::default()
        }
    }
}

/// Parses `product`, `layered` or `layered:L`.
pub fn parse_ansatz(s: &str) -> std::result::Result<Ansatz, String> {
    match s.split_once(':') {
        None if s == "product" => Ok(Ansatz::Product),
        None if s == "layered" => Ok(Ansatz::Layered { layers: 1 }),
        Some(("layered", l)) => l
            .parse()
            .map(|layers| Ansatz::Layered { layers })
            .map_err(|_| format!("bad layer count {l:?}")),
        _ => Err(format!(
            "unknown ansatz {s:?}; use product, layered or layered:L"
        )),
    }
}

/// Inverse of [`parse_ansatz`].
pub fn format_ansatz(a: Ansatz) -> String {
    match a {
        Ansatz::Product => "product".into(),
        Ansatz::Layered { layers } => format!("layered:{layers}"),
    }
}
