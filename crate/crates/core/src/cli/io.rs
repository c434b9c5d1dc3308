//! Versioned result documents and atomic file output.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Method};
use crate::cmp::CmpInstance;
use crate::error::{Error, Result};
use crate::metrics::{Expectation, OracleResult, Overlap};
use crate::movco::FitnessPair;

pub const INSTANCE_SCHEMA: &str = "movco.instance/1";
pub const SUMMARY_SCHEMA: &str = "movco.summary/1";
pub const TRACE_SCHEMA: &str = "movco.trace/1";
pub const COMPARISON_SCHEMA: &str = "movco.comparison/1";
pub const SWEEP_SCHEMA: &str = "movco.sweep/1";

/// Column order of every per-step trace table.
pub const TRACE_HEADER: [&str; 11] = [
    "step",
    "evaluations",
    "best_p",
    "mean_p",
    "best_e",
    "mean_e",
    "objective",
    "expected_p",
    "expected_cost",
    "approximation_ratio",
    "overlap",
];

/// Instance document: the instance fields plus a schema tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub schema: String,
    #[serde(flatten)]
    pub instance: CmpInstance,
}

/// Exhaustive-search facts stored in a summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub c_min: f64,
    pub c_max: f64,
    pub optimal_count: usize,
    pub feasible_count: u64,
    pub satisfiability_cap: usize,
    /// Cash-level matrix of the first optimal schedule in index order.
    pub optimal_schedule: Option<Vec<Vec<u8>>>,
}

impl OracleSummary {
    pub fn new(oracle: &OracleResult, instance: &CmpInstance) -> Self {
        Self {
            c_min: oracle.c_min,
            c_max: oracle.c_max,
            optimal_count: oracle.optimal.len(),
            feasible_count: oracle.feasible_count,
            satisfiability_cap: oracle.satisfiability_cap,
            optimal_schedule: oracle.optimal_schedules(instance).first().map(|s| s.rows()),
        }
    }
}

/// Outcome of one method on one instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryDocument {
    pub schema: String,
    pub method: Method,
    pub config: ExperimentConfig,
    pub instance_index: usize,
    /// Seed handed to the optimizer for this instance.
    pub run_seed: u64,
    pub instance: CmpInstance,
    pub evaluations: usize,
    pub fitness: Option<FitnessPair>,
    pub expectation: Option<Expectation>,
    pub schedule: Option<Vec<Vec<u8>>>,
    pub schedule_cost: Option<f64>,
    pub params: Option<Vec<f64>>,
    pub oracle: Option<OracleSummary>,
    pub approximation_ratio: Option<f64>,
    pub overlap: Option<Overlap>,
}

/// One row of a trace table.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub evaluations: usize,
    pub best_p: Option<f64>,
    pub mean_p: Option<f64>,
    pub best_e: Option<f64>,
    pub mean_e: Option<f64>,
    pub objective: Option<f64>,
    pub expected_p: Option<f64>,
    pub expected_cost: Option<f64>,
    pub approximation_ratio: Option<f64>,
    pub overlap: Option<f64>,
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()
    };
    write().map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("documents serialize");
    out.push(b'\n');
    out
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &to_json(value))
}

/// Reads a JSON document after checking its `schema` field.
pub fn read_json<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| format_error(path, e))?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(s) if s == schema => {}
        found => {
            return Err(Error::Schema {
                found: found.unwrap_or("<missing>").to_string(),
                expected: schema.to_string(),
            })
        }
    }
    serde_json::from_value(value).map_err(|e| format_error(path, e))
}

fn format_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

pub fn write_instance(path: &Path, instance: &CmpInstance) -> Result<()> {
    write_json(
        path,
        &InstanceDocument {
            schema: INSTANCE_SCHEMA.into(),
            instance: instance.clone(),
        },
    )
}

pub fn read_instance(path: &Path) -> Result<CmpInstance> {
    let doc: InstanceDocument = read_json(path, INSTANCE_SCHEMA)?;
    doc.instance.validate().map_err(|e| format_error(path, e))?;
    Ok(doc.instance)
}

/// CSV bytes: a `#schema` line, then a header row, then `rows`.
pub fn to_csv<T: Serialize>(schema: &str, rows: &[T]) -> Result<Vec<u8>> {
    let mut out = format!("#schema={schema}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        for r in rows {
            w.serialize(r)
                .map_err(|e| Error::InvalidState(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::InvalidState(e.to_string()))?;
    }
    Ok(out)
}

/// Reads a CSV table written by [`to_csv`], rejecting other schemas.
pub fn read_csv<T: DeserializeOwned>(path: &Path, schema: &str) -> Result<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader
        .read_line(&mut first)
        .map_err(|e| Error::io(path, e))?;
    let found = first
        .trim_end()
        .strip_prefix("#schema=")
        .unwrap_or("<missing>");
    if found != schema {
        return Err(Error::Schema {
            found: found.to_string(),
            expected: schema.to_string(),
        });
    }
    csv::Reader::from_reader(reader)
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| format_error(path, e))
}

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    write_atomic(path, &to_csv(TRACE_SCHEMA, rows)?)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    read_csv(path, TRACE_SCHEMA)
}
