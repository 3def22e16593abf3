//! CSV and JSON writers. Every document starts with the schema version and
//! the run configuration (without the output path), so a run can be repeated
//! from its own output.

use serde_json::{Map, Number, Value};

use crate::config::RunConfig;

pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A JSON number with 17 significant digits; non-finite values become null.
pub fn json_f64(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    fmt_f64(v)
        .parse::<Number>()
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn json_f64s(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| json_f64(v)).collect())
}

pub struct CsvDoc {
    text: String,
}

impl CsvDoc {
    pub fn new(cfg: &RunConfig) -> Self {
        let mut text = format!("#qpl schema={SCHEMA_VERSION}\n");
        for (k, v) in cfg.pairs(false) {
            text.push_str(&format!("#cfg {k}={v}\n"));
        }
        CsvDoc { text }
    }

    /// Starts a table: a `#table name` line followed by the column names.
    pub fn table(&mut self, name: &str, columns: &[&str]) {
        self.text.push_str(&format!("#table {name}\n{}\n", columns.join(",")));
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub struct JsonDoc {
    map: Map<String, Value>,
}

impl JsonDoc {
    pub fn new(cfg: &RunConfig) -> Self {
        let mut map = Map::new();
        map.insert("schema".into(), Value::from(SCHEMA_VERSION));
        let config: Map<String, Value> = cfg
            .pairs(false)
            .into_iter()
            .map(|(k, v)| (k.to_string(), Value::String(v)))
            .collect();
        map.insert("config".into(), Value::Object(config));
        JsonDoc { map }
    }

    pub fn insert(&mut self, key: &str, value: Value) {
        self.map.insert(key.to_string(), value);
    }

    pub fn finish(self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.map)).expect("serializable");
        s.push('\n');
        s
    }
}
