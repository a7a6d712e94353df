use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::{Failure, Format};

/// Everything a command reports. The header fields identify the run well
/// enough to repeat it; nothing in here depends on wall-clock time.
#[derive(Debug, Serialize)]
pub struct Document {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub seed: u64,
    pub config: Value,
    /// Values derived from the configuration, such as a default alpha.
    pub parameters: Value,
    pub results: Vec<Value>,
    pub summary: Value,
}

impl Document {
    pub fn new(command: &'static str, seed: u64, config: Value, parameters: Value) -> Self {
        Document {
            tool: "locality-lab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
            parameters,
            results: Vec::new(),
            summary: Value::Null,
        }
    }

    fn header(&self) -> Value {
        json!({
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "parameters": self.parameters,
        })
    }

    pub fn write(&self, path: Option<&Path>, format: Format) -> Result<(), Failure> {
        let mut out = open(path)?;
        let io = |e: io::Error| Failure::usage(format!("cannot write output: {e}"));
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, self)
                    .map_err(|e| Failure::usage(e.to_string()))?;
                writeln!(out).map_err(io)?;
            }
            Format::Jsonl => {
                writeln!(out, "{}", self.header()).map_err(io)?;
                for row in &self.results {
                    writeln!(out, "{row}").map_err(io)?;
                }
                writeln!(out, "{}", json!({ "summary": self.summary })).map_err(io)?;
            }
            Format::Csv => {
                writeln!(out, "# {}", self.header()).map_err(io)?;
                write_csv(&mut out, &self.results)?;
                writeln!(out, "# summary {}", self.summary).map_err(io)?;
            }
        }
        out.flush().map_err(io)
    }
}

pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Failure::usage(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Writes `records` as JSON lines, each tagged with its trial index.
pub fn write_trace<T: Serialize>(path: &Path, trials: &[Vec<T>]) -> Result<(), Failure> {
    let mut out = open(Some(path))?;
    for (trial, records) in trials.iter().enumerate() {
        for r in records {
            let mut line = match serde_json::to_value(r).expect("records serialize") {
                Value::Object(m) => m,
                other => Map::from_iter([("record".to_string(), other)]),
            };
            line.insert("trial".into(), json!(trial));
            writeln!(out, "{}", Value::Object(line)).map_err(|e| Failure::usage(e.to_string()))?;
        }
    }
    out.flush().map_err(|e| Failure::usage(e.to_string()))
}

fn write_csv(out: &mut dyn Write, rows: &[Value]) -> Result<(), Failure> {
    let flat: Vec<Map<String, Value>> = rows
        .iter()
        .map(|r| {
            let mut m = Map::new();
            flatten("", r, &mut m);
            m
        })
        .collect();
    let mut columns: Vec<String> = Vec::new();
    for row in &flat {
        for key in row.keys() {
            if !columns.contains(key) {
                columns.push(key.clone());
            }
        }
    }
    let mut writer = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Failure::usage(format!("cannot write CSV: {e}"));
    writer.write_record(&columns).map_err(err)?;
    for row in &flat {
        writer
            .write_record(
                columns
                    .iter()
                    .map(|c| row.get(c).map(cell).unwrap_or_default()),
            )
            .map_err(err)?;
    }
    writer.flush().map_err(|e| Failure::usage(e.to_string()))
}

/// Nested objects become `parent.child` columns.
fn flatten(prefix: &str, value: &Value, out: &mut Map<String, Value>) {
    match value {
        Value::Object(m) => {
            for (k, v) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

/// Arrays are joined with `;`, inner arrays (edges) with `-`.
fn cell(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items
            .iter()
            .map(|item| match item {
                Value::Array(inner) => inner.iter().map(cell).collect::<Vec<_>>().join("-"),
                other => cell(other),
            })
            .collect::<Vec<_>>()
            .join(";"),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells() {
        assert_eq!(cell(&json!([[0, 1], [2, 3]])), "0-1;2-3");
        assert_eq!(cell(&json!([1, 2])), "1;2");
        assert_eq!(cell(&json!(null)), "");
        assert_eq!(cell(&json!(1.5)), "1.5");
    }

    #[test]
    fn nested_columns() {
        let mut m = Map::new();
        flatten(
            "",
            &json!({ "a": 1, "b": { "c": 2, "d": { "e": 3 } } }),
            &mut m,
        );
        assert_eq!(
            m.keys().cloned().collect::<Vec<_>>(),
            vec!["a", "b.c", "b.d.e"]
        );
    }
}
