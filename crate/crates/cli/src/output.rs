//! Result rendering: JSON objects with a schema field, CSV tables, raw text.

use serde_json::{json, Map, Value};

pub const SCHEMA: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub enum Output {
    Json(Value),
    Table { headers: Vec<String>, rows: Vec<Vec<f64>> },
    Text(String),
}

/// Object with `"schema": 1` merged in.
pub fn object(value: Value) -> Output {
    let mut map = match value {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("schema".into(), json!(SCHEMA));
    Output::Json(Value::Object(map))
}

pub fn table(headers: &[&str], rows: Vec<Vec<f64>>) -> Output {
    Output::Table {
        headers: headers.iter().map(|h| h.to_string()).collect(),
        rows,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

impl Output {
    pub fn default_format(&self) -> Format {
        match self {
            Output::Table { .. } => Format::Csv,
            _ => Format::Json,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match (self, format) {
            (Output::Text(s), _) => s.clone(),
            (Output::Json(v), Format::Json) => format!("{}\n", serde_json::to_string_pretty(v).expect("valid JSON")),
            (Output::Json(v), Format::Csv) => {
                let map = v.as_object().cloned().unwrap_or_default();
                let keys: Vec<&String> = map.keys().collect();
                let vals: Vec<String> = map.values().map(scalar).map(|s| s.replace(',', ";")).collect();
                let head: Vec<&str> = keys.iter().map(|k| k.as_str()).collect();
                format!("{}\n{}\n", head.join(","), vals.join(","))
            }
            (Output::Table { headers, rows }, Format::Csv) => {
                let mut s = headers.join(",");
                s.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
                    s.push_str(&cells.join(","));
                    s.push('\n');
                }
                s
            }
            (Output::Table { headers, rows }, Format::Json) => {
                let v = json!({ "schema": SCHEMA, "columns": headers, "rows": rows });
                format!("{}\n", serde_json::to_string_pretty(&v).expect("valid JSON"))
            }
        }
    }
}
