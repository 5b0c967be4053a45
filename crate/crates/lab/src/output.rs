//! Deterministic text artifacts: fixed column order, a fixed number of
//! significant digits, `\n` line ends, and the effective configuration
//! echoed at the top.

use serde_json::{Number, Value};

use crate::config::{Format, RunConfig};

/// `x` with `digits` significant digits in scientific notation; `nan`,
/// `inf` and `-inf` for non-finite values.
pub fn format_number(x: f64, digits: usize) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.*e}", digits.saturating_sub(1), x)
    }
}

/// A JSON number carrying exactly the formatted digits; `null` when not
/// finite.
pub fn json_number(x: f64, digits: usize) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let n: Number = serde_json::from_str(&format_number(x, digits)).expect("formatted float is a JSON number");
    Value::Number(n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

/// Rows under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self, config: &RunConfig) -> String {
        let digits = config.output.precision;
        let mut out = config_comment(config);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(x) => format_number(*x, digits),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self, digits: usize) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, c) in self.columns.iter().zip(row) {
                    let v = match c {
                        Cell::Int(i) => Value::from(*i),
                        Cell::Num(x) => json_number(*x, digits),
                        Cell::Text(s) => Value::from(s.as_str()),
                    };
                    obj.insert((*name).to_string(), v);
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }

    pub fn to_json(&self, config: &RunConfig) -> String {
        document(config, "rows", self.to_json_value(config.output.precision))
    }

    pub fn render(&self, config: &RunConfig) -> String {
        match config.output.format {
            Format::Csv => self.to_csv(config),
            Format::Json => self.to_json(config),
        }
    }
}

/// `{"config": ..., key: body}` pretty-printed with a trailing newline.
pub fn document(config: &RunConfig, key: &str, body: Value) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("config".into(), serde_json::to_value(config).expect("configuration always serializes"));
    obj.insert(key.into(), body);
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Effective configuration as `#`-prefixed TOML lines.
pub fn config_comment(config: &RunConfig) -> String {
    config
        .to_toml()
        .lines()
        .map(|l| if l.is_empty() { "#\n".to_string() } else { format!("# {l}\n") })
        .collect()
}
