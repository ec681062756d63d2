use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const TOOL: &str = "kobalt";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One pass/fail verdict inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into() }
    }
}

/// Rows for CSV output. Every cell is already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn write<W: std::io::Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// What a command produces before it is wrapped in the envelope.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Object whose fields are merged into the top level of the report.
    pub result: Map<String, Value>,
    pub checks: Vec<Check>,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn from_result<T: Serialize>(result: &T) -> Self {
        let result = match serde_json::to_value(result).expect("reports serialize") {
            Value::Object(m) => m,
            other => Map::from_iter([("value".to_string(), other)]),
        };
        Self { result, ..Default::default() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.result.insert(key.to_string(), serde_json::to_value(value).expect("reports serialize"));
        self
    }

    pub fn check(mut self, check: Check) -> Self {
        self.checks.push(check);
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(flatten)]
    pub result: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, config: Value, outcome: Outcome) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            config,
            passed: outcome.checks.iter().all(|c| c.passed),
            checks: outcome.checks,
            result: outcome.result,
        }
    }
}

/// Shortest round-trip decimal form, `.` as separator.
pub fn num(x: f64) -> String {
    format!("{x}")
}
