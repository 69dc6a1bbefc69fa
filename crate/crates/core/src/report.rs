//! Structured results and their JSON, CSV and text renderings.

use serde::Serialize;
use serde_json::{json, Map, Value};

/// Sections are always emitted, in this order, with `null` or empty values when unused.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Report {
    pub complex: Value,
    pub betti: Value,
    pub spectra: Value,
    pub signed: Value,
    pub orientable: Value,
    pub walks: Value,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub table: Option<Table>,
}

/// A header row and data rows, used for CSV output when present.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// A value checked against an upper tolerance.
pub fn checked(value: f64, tolerance: f64) -> Value {
    json!({ "value": value, "tolerance": tolerance, "pass": value <= tolerance })
}

/// A measured value together with the tolerance it was computed or compared with.
pub fn measured(value: f64, tolerance: f64) -> Value {
    json!({ "value": value, "tolerance": tolerance })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// The table if one was produced, else every leaf as a `path,value` row.
    pub fn to_csv(&self) -> String {
        let table = self.table.clone().unwrap_or_else(|| {
            let mut t = Table::new(&["path", "value"]);
            for (k, v) in self.leaves() {
                t.push(vec![k, v]);
            }
            t
        });
        let mut out = String::new();
        out.push_str(&table.header.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &table.rows {
            out.push_str(&row.iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    /// One `path = value` line per leaf.
    pub fn to_text(&self) -> String {
        self.leaves().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    fn leaves(&self) -> Vec<(String, String)> {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut out = Vec::new();
        flatten("", &value, &mut out);
        out
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Null => {}
        Value::Object(map) => flatten_map(map, &join, out),
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            if !items.is_empty() {
                let parts: Vec<String> = items.iter().map(scalar).collect();
                out.push((prefix.to_string(), format!("[{}]", parts.join(", "))));
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

fn flatten_map(map: &Map<String, Value>, join: &dyn Fn(&str) -> String, out: &mut Vec<(String, String)>) {
    for (k, v) in map {
        flatten(&join(k), v, out);
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
