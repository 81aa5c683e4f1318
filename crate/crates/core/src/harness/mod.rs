//! Config ingestion, report assembly and the inclusion workflow that ties
//! the operator backends to the set and boundary modules.

pub mod csv;
pub mod demo;
pub mod report;

use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cmv::{CmvDescriptor, VerblunskyCoefficients};
use crate::grid::{AngularGrid, Grid};
use crate::interval_sets::{AnySet, Carrier, SetDescriptor};
use crate::jacobi::{JacobiCoefficients, JacobiDescriptor};
use crate::schrodinger::{PiecewisePotential, SchrodingerDescriptor};
use crate::spectral::{AnalysisOptions, LineOperator};

pub use demo::{emit_sets_demo, SetsDemo};
pub use report::{verify_inclusion, Check, SpectralReport, Status};

pub const SCHEMA_VERSION: &str = "v1";
pub const SUPPORTED_TYPES: [&str; 3] = ["jacobi", "cmv", "schrodinger"];

/// Harness failures, each with its process exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("unknown operator type {found:?}; supported types: jacobi, cmv, schrodinger")]
    UnknownType { found: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Malformed(_) => 2,
            HarnessError::UnknownType { .. } => 3,
            HarnessError::Io { .. } => 4,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}

fn malformed(e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Malformed(e.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Jacobi(JacobiCoefficients),
    Cmv(VerblunskyCoefficients),
    Schrodinger(PiecewisePotential),
}

impl Operator {
    /// Dispatches on `"type"`; unknown types are reported separately from
    /// schema violations.
    pub fn from_json(v: &Value) -> Result<Self, HarnessError> {
        let kind = v
            .get("type")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed("operator descriptor needs a string \"type\""))?;
        match kind {
            "jacobi" => {
                let d: JacobiDescriptor = serde_json::from_value(v.clone()).map_err(malformed)?;
                Ok(Operator::Jacobi(JacobiCoefficients::from_descriptor(&d).map_err(malformed)?))
            }
            "cmv" => {
                let d: CmvDescriptor = serde_json::from_value(v.clone()).map_err(malformed)?;
                Ok(Operator::Cmv(VerblunskyCoefficients::from_descriptor(&d).map_err(malformed)?))
            }
            "schrodinger" => {
                let d: SchrodingerDescriptor = serde_json::from_value(v.clone()).map_err(malformed)?;
                Ok(Operator::Schrodinger(PiecewisePotential::from_descriptor(&d).map_err(malformed)?))
            }
            other => Err(HarnessError::UnknownType { found: other.into() }),
        }
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let v: Value = serde_json::from_str(text).map_err(malformed)?;
        Self::from_json(&v)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Operator::Jacobi(_) => "jacobi",
            Operator::Cmv(_) => "cmv",
            Operator::Schrodinger(_) => "schrodinger",
        }
    }

    pub fn descriptor(&self) -> Value {
        let v = match self {
            Operator::Jacobi(j) => serde_json::to_value(j.to_descriptor()),
            Operator::Cmv(c) => serde_json::to_value(c.to_descriptor()),
            Operator::Schrodinger(s) => serde_json::to_value(s.to_descriptor()),
        };
        v.expect("descriptors serialize")
    }

    pub fn carrier(&self) -> Carrier {
        match self {
            Operator::Cmv(_) => Carrier::Circle,
            _ => Carrier::Line,
        }
    }

    /// Spectral window with 4001 points on the line, 512 angles on the circle.
    pub fn default_grid(&self) -> GridSpec {
        let line = |(lo, hi): (f64, f64)| GridSpec::Line(Grid::new(lo, hi, 4001).expect("window is finite"));
        match self {
            Operator::Jacobi(j) => line(j.spectral_window()),
            Operator::Schrodinger(s) => line(s.spectral_window()),
            Operator::Cmv(_) => GridSpec::Circle(AngularGrid::new(512).expect("valid")),
        }
    }

    /// `a:b:n` on the line; `n` or a full-turn `a:b:n` on the circle.
    pub fn parse_grid(&self, spec: &str) -> Result<GridSpec, HarnessError> {
        match self.carrier() {
            Carrier::Line => Grid::parse(spec).map(GridSpec::Line).map_err(malformed),
            Carrier::Circle => {
                let parts: Vec<&str> = spec.split(':').collect();
                let n = match parts.as_slice() {
                    [n] => n.trim().parse::<usize>().map_err(malformed)?,
                    [a, b, n] => {
                        let a: f64 = a.trim().parse().map_err(malformed)?;
                        let b: f64 = b.trim().parse().map_err(malformed)?;
                        if (b - a - TAU).abs() > 1e-6 {
                            return Err(malformed(format!(
                                "circle grids cover the full turn, got {a}:{b}"
                            )));
                        }
                        n.trim().parse::<usize>().map_err(malformed)?
                    }
                    _ => return Err(malformed(format!("bad circle grid {spec:?}"))),
                };
                AngularGrid::new(n).map(GridSpec::Circle).map_err(malformed)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "carrier", rename_all = "lowercase")]
pub enum GridSpec {
    Line(Grid),
    Circle(AngularGrid),
}

impl GridSpec {
    pub fn step(&self) -> f64 {
        match self {
            GridSpec::Line(g) => g.step(),
            GridSpec::Circle(g) => g.step(),
        }
    }
}

/// Effective thresholds; every field falls back to its module default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub analysis: AnalysisOptions,
    /// Interior identity residuals (relative).
    pub identity_tol: f64,
    /// `Re M₁,₁` boundary identity on reflectionless points.
    pub boundary_identity_tol: f64,
    /// Random interior points per identity.
    pub identity_samples: usize,
    /// Jacobi truncation size for the Green's function oracle.
    pub jacobi_window: usize,
    /// CMV truncation size for the `M₁,₁` oracle.
    pub cmv_window: usize,
    /// CMV truncation size for `R(ζ)`.
    pub r_window: usize,
    pub r_rank_tol: f64,
    /// Allowed negative eigenvalue of `R(ζ)`.
    pub r_psd_tol: f64,
    /// Grid steps of slack for set inclusions.
    pub slack_steps: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            analysis: AnalysisOptions::default(),
            identity_tol: 1e-10,
            boundary_identity_tol: 1e-3,
            identity_samples: 200,
            jacobi_window: 3000,
            cmv_window: 1024,
            r_window: 2048,
            r_rank_tol: 1e-2,
            r_psd_tol: 1e-2,
            slack_steps: 1.0,
        }
    }
}

fn default_schema() -> String {
    SCHEMA_VERSION.into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub operators: Vec<OperatorEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorEntry {
    pub name: String,
    pub descriptor: Value,
    /// `"a:b:n"`, or an angle count for CMV; the operator default otherwise.
    #[serde(default)]
    pub grid: Option<Value>,
    /// Candidate reflectionless set.
    #[serde(default, rename = "E")]
    pub e: Option<SetDescriptor>,
    /// Replaces the config-level tolerances for this operator.
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
}

/// One validated unit of work.
#[derive(Debug, Clone)]
pub struct Job {
    pub name: String,
    pub operator: Operator,
    pub grid: GridSpec,
    pub e: Option<AnySet>,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Job {
    pub fn run(&self) -> SpectralReport {
        verify_inclusion(&self.operator, self.e.as_ref(), &self.grid, &self.tolerances, self.seed)
            .named(&self.name)
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) && !s.starts_with('.')
}

/// Parses and validates a whole config before anything runs.
pub fn load_config(text: &str) -> Result<Vec<Job>, HarnessError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(malformed)?;
    if cfg.schema != SCHEMA_VERSION {
        return Err(malformed(format!("unsupported schema {:?}, expected {SCHEMA_VERSION:?}", cfg.schema)));
    }
    if cfg.operators.is_empty() {
        return Err(malformed("config lists no operators"));
    }
    let mut seen = BTreeSet::new();
    let mut jobs = Vec::new();
    for (i, entry) in cfg.operators.iter().enumerate() {
        if !valid_name(&entry.name) || !seen.insert(entry.name.clone()) {
            return Err(malformed(format!("operator name {:?} is invalid or repeated", entry.name)));
        }
        let operator = Operator::from_json(&entry.descriptor)?;
        let grid = match &entry.grid {
            None => operator.default_grid(),
            Some(Value::String(s)) => operator.parse_grid(s)?,
            Some(Value::Number(n)) => operator.parse_grid(&n.to_string())?,
            Some(other) => return Err(malformed(format!("grid must be a string or count, got {other}"))),
        };
        let e = match &entry.e {
            None => None,
            Some(d) => {
                let s = d.build().map_err(malformed)?;
                if s.carrier() != operator.carrier() {
                    return Err(malformed(format!("E for {:?} lives on the wrong carrier", entry.name)));
                }
                Some(s)
            }
        };
        jobs.push(Job {
            name: entry.name.clone(),
            operator,
            grid,
            e,
            tolerances: entry.tolerances.clone().unwrap_or_else(|| cfg.tolerances.clone()),
            seed: cfg.seed.wrapping_add(i as u64),
        });
    }
    Ok(jobs)
}

/// Outcome of [`run_config`]: reports in config order and the files written.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reports: Vec<SpectralReport>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.status == Status::Pass)
    }
}

/// Reads the config, runs every operator in parallel and writes
/// `<name>.json` and `<name>.csv` per operator plus `summary.json`.
/// Nothing is written unless the whole config validates.
pub fn run_config(config: &Path, out: &Path) -> Result<RunOutcome, HarnessError> {
    let text = fs::read_to_string(config).map_err(|e| HarnessError::io(config, e))?;
    let jobs = load_config(&text)?;
    let results: Vec<(SpectralReport, String)> = jobs
        .par_iter()
        .map(|job| {
            let report = job.run();
            let table = csv::table(&job.operator, &job.grid, &job.tolerances, &report);
            (report, table)
        })
        .collect();
    fs::create_dir_all(out).map_err(|e| HarnessError::io(out, e))?;
    let mut files = Vec::new();
    for (report, table) in &results {
        let json_path = out.join(format!("{}.json", report.name));
        let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
        fs::write(&json_path, text).map_err(|e| HarnessError::io(&json_path, e))?;
        let csv_path = out.join(format!("{}.csv", report.name));
        fs::write(&csv_path, table).map_err(|e| HarnessError::io(&csv_path, e))?;
        files.push(json_path);
        files.push(csv_path);
    }
    let summary: Vec<Value> = results
        .iter()
        .map(|(r, _)| serde_json::json!({"name": r.name, "type": r.operator["type"], "status": r.status}))
        .collect();
    let summary_path = out.join("summary.json");
    let body = serde_json::json!({"schema": SCHEMA_VERSION, "reports": summary});
    fs::write(&summary_path, serde_json::to_string_pretty(&body).expect("json") + "\n")
        .map_err(|e| HarnessError::io(&summary_path, e))?;
    files.push(summary_path);
    Ok(RunOutcome {
        reports: results.into_iter().map(|(r, _)| r).collect(),
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_type_and_malformed_are_distinct() {
        let e = Operator::parse(r#"{"type":"dirac","period":1}"#).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("jacobi, cmv, schrodinger"));
        assert_eq!(Operator::parse("{not json").unwrap_err().exit_code(), 2);
        assert_eq!(Operator::parse(r#"{"type":"jacobi","period":2,"a":[1],"b":[0]}"#).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn config_validation() {
        let ok = r#"{"operators":[{"name":"f","descriptor":{"type":"cmv","period":1,"alpha":[[0,0]]},"grid":64}]}"#;
        let jobs = load_config(ok).unwrap();
        assert_eq!(jobs[0].grid, GridSpec::Circle(AngularGrid::new(64).unwrap()));
        let dup = r#"{"operators":[
            {"name":"f","descriptor":{"type":"jacobi","period":1,"a":[1],"b":[0]}},
            {"name":"f","descriptor":{"type":"jacobi","period":1,"a":[1],"b":[0]}}]}"#;
        assert_eq!(load_config(dup).unwrap_err().exit_code(), 2);
        let carrier = r#"{"operators":[{"name":"f","descriptor":{"type":"jacobi","period":1,"a":[1],"b":[0]},
            "E":{"carrier":"circle","intervals":[[0,1,"cc"]]}}]}"#;
        assert_eq!(load_config(carrier).unwrap_err().exit_code(), 2);
        let half = r#"{"operators":[{"name":"f","descriptor":{"type":"cmv","period":1,"alpha":[[0,0]]},"grid":"0:3:10"}]}"#;
        assert_eq!(load_config(half).unwrap_err().exit_code(), 2);
        let typo = r#"{"operators":[],"tolerances":{"identity_tl":1}}"#;
        assert_eq!(load_config(typo).unwrap_err().exit_code(), 2);
    }
}
