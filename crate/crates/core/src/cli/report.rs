use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::fmt::{format_g, round_sig};

pub const SCHEMA: &str = "fs-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub config: RunConfig,
    pub payload: Value,
    pub timing: Timing,
}

impl Report {
    pub fn new(config: RunConfig, payload: Value, elapsed_seconds: f64) -> Self {
        Self {
            schema: SCHEMA.to_owned(),
            config,
            payload,
            timing: Timing { elapsed_seconds },
        }
    }

    /// Pretty JSON with every float rounded to 12 significant digits;
    /// non-finite values become null.
    pub fn to_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        round_floats(&mut v);
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }
}

pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = serde_json::Number::from_f64(round_sig(x, 12)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// serde_json maps non-finite floats to null; this keeps that explicit
/// for values built by hand.
pub fn finite_or_null(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Plot-ready CSV: header row, then one row per record.
pub struct Csv {
    columns: Vec<&'static str>,
    body: String,
}

impl Csv {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            body: String::new(),
        }
    }

    pub fn row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns.len(), "CSV row width");
        let cells: Vec<String> = values
            .iter()
            .map(|&x| if x.is_finite() { format_g(x, 12) } else { String::new() })
            .collect();
        let _ = writeln!(self.body, "{}", cells.join(","));
    }

    pub fn render(&self) -> String {
        format!("{}\n{}", self.columns.join(","), self.body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::{Command, RunConfig};
    use crate::geometry::MeshKind;
    use crate::solver::Refinement;

    fn config() -> RunConfig {
        RunConfig {
            command: Command::Study,
            d: 2,
            degrees: vec![4, 8],
            eps: 0.5,
            alpha: vec![8.0],
            radius: 1.0,
            mesh: MeshKind::Fibonacci,
            mesh_size: None,
            refinement: Refinement::Both,
            max_iterations: 100,
            stop_tol: 1e-10,
            cert_tol: 0.05,
            seed: 7,
            samples: 10,
            trials: 5,
            points: vec![],
            out: None,
        }
    }

    #[test]
    fn json_rounds_and_round_trips() {
        let payload = serde_json::json!({"x": 0.1 + 0.2, "inf": f64::INFINITY, "n": 3});
        let r = Report::new(config(), payload, 1.0 / 3.0);
        let text = r.to_json().unwrap();
        assert!(text.contains("\"x\": 0.3"));
        assert!(text.contains("\"inf\": null"));
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_json().unwrap(), text);
        assert_eq!(back.config, r.config);
    }

    #[test]
    fn csv_layout() {
        let mut c = Csv::new(&["a", "b"]);
        c.row(&[1.0, f64::NAN]);
        c.row(&[0.1 + 0.2, 2e-20]);
        assert_eq!(c.render(), "a,b\n1,\n0.3,2e-20\n");
    }
}
