//! Report assembly and canonical serialization.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Undecided,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub schema_version: u32,
    pub inputs_digest: String,
    pub seed: u64,
    pub tol: f64,
    pub budget: Value,
    pub summary: Value,
    pub records: Vec<Value>,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every float and sorts every object's keys.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        Value::Object(o) => {
            let mut sorted: Vec<(String, Value)> = o.into_iter().collect();
            sorted.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(sorted.into_iter().map(|(k, v)| (k, canonical(v))).collect::<Map<_, _>>())
        }
        other => other,
    }
}

pub fn to_json(report: &Report) -> String {
    let v = canonical(serde_json::to_value(report).expect("report serializes"));
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// One row per record; columns are the sorted union of flattened keys.
pub fn to_csv(report: &Report) -> CliResult<String> {
    let rows: Vec<Vec<(String, String)>> = report
        .records
        .iter()
        .map(|r| {
            let mut cells = Vec::new();
            flatten("", &canonical(r.clone()), &mut cells);
            cells
        })
        .collect();
    let columns: BTreeSet<&str> = rows.iter().flatten().map(|(k, _)| k.as_str()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    if !rows.is_empty() {
        w.write_record(&columns)?;
        for row in &rows {
            w.write_record(columns.iter().map(|c| {
                row.iter().find(|(k, _)| k == c).map_or("", |(_, v)| v.as_str())
            }))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn render(report: &Report, format: Format) -> CliResult<String> {
    match format {
        Format::Json => Ok(to_json(report)),
        Format::Csv => to_csv(report),
    }
}

/// Writes through a temporary file in the target directory and renames it
/// into place.
pub fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(text.as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
