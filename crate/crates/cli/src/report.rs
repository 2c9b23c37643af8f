//! Report document and its JSON / CSV serializations.
//!
//! The `results` array depends only on the job (and seed); wall-clock data
//! lives in `timing` so results can be diffed byte for byte.

use serde::Serialize;
use serde_json::Value;
use toric_tee::{AreaReport, Boundary, EntropyMethod, InvariantReport};

use crate::error::{CliError, CliResult};
use crate::spec::{JobSpec, OutputFormat, Probe};

/// Version of both the job schema and the report schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub input: JobSpec,
    pub results: Vec<TaskResult>,
    pub timing: Timing,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: "toric-tee",
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub threads: usize,
    pub total_seconds: f64,
    pub task_seconds: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TaskResult {
    pub task: usize,
    pub kind: &'static str,
    pub passed: bool,
    pub output: TaskOutput,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum TaskOutput {
    Entropy { rows: Vec<EntropyRow> },
    Invariant(InvariantOutput),
    GraphReduce(GraphOutput),
    Excitation(ExcitationOutput),
    Checks { checks: Vec<CheckRow> },
    Targets { targets: Vec<TargetRow> },
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyRow {
    pub name: String,
    pub qubits: usize,
    pub entropy_bits: usize,
    pub method: EntropyMethodLabel,
    /// `area − N_R`.
    pub predicted: i64,
    pub area: AreaReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethodLabel {
    Both,
    RestrictedRank,
    FattalPairs,
}

impl From<EntropyMethod> for EntropyMethodLabel {
    fn from(m: EntropyMethod) -> Self {
        match m {
            EntropyMethod::RestrictedRank => EntropyMethodLabel::RestrictedRank,
            EntropyMethod::FattalPairs => EntropyMethodLabel::FattalPairs,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantOutput {
    pub face: Option<String>,
    pub boundary: Option<Boundary>,
    pub report: InvariantReport,
    /// `N_R` of BC, CD, B and D.
    pub components_rough_free: [usize; 4],
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphOutput {
    pub name: String,
    pub vertices: usize,
    pub edges: usize,
    pub dangling: usize,
    pub expected_bits: usize,
    pub ebits: usize,
    pub complete: bool,
    pub steps: usize,
    pub random_ebits: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcitationOutput {
    pub face: String,
    pub boundary: Boundary,
    pub probe: Probe,
    pub operator_weight: usize,
    pub syndrome_weight: usize,
    pub condensed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetRow {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

impl ReportDocument {
    pub fn failed_targets(&self) -> usize {
        self.results
            .iter()
            .filter_map(|r| match &r.output {
                TaskOutput::Targets { targets } => Some(targets.iter().filter(|t| !t.passed).count()),
                _ => None,
            })
            .sum()
    }

    /// The deterministic part of the report.
    pub fn results_json(&self) -> String {
        serde_json::to_string_pretty(&self.results).expect("results serialize")
    }

    pub fn render(&self, format: OutputFormat) -> CliResult<String> {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Long format: one row per scalar, `task,kind,item,field,value`.
    /// Array entries with a `name` are keyed by it.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
        w.write_record(["task", "kind", "item", "field", "value"]).map_err(csv_err)?;
        for r in &self.results {
            let mut rows = Vec::new();
            rows.push((String::new(), "passed".to_string(), r.passed.to_string()));
            let v = serde_json::to_value(&r.output).expect("output serializes");
            flatten(&v, "", "", &mut rows);
            for (item, field, value) in rows {
                w.write_record([&r.task.to_string(), r.kind, &item, &field, &value]).map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn flatten(v: &Value, item: &str, field: &str, out: &mut Vec<(String, String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if k == "name" && !item.is_empty() {
                    continue;
                }
                flatten(x, item, &join(field, k), out);
            }
        }
        Value::Array(a) if a.iter().all(|x| x.get("name").is_some_and(Value::is_string)) && !a.is_empty() => {
            for x in a {
                let name = x["name"].as_str().unwrap_or_default();
                flatten(x, &join(item, name), "", out);
            }
        }
        Value::Array(a) => {
            let scalars: Vec<String> = a.iter().map(scalar).collect();
            out.push((item.into(), field.into(), scalars.join(" ")));
        }
        _ => out.push((item.into(), field.into(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
