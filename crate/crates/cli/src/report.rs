//! Versioned JSON reports.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "pform-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// Exact rational zero.
    ExactZero,
    /// `value < tolerance`.
    Below,
    /// `value > tolerance`.
    Above,
    /// A boolean property; `value` is 1 or 0.
    Holds,
    /// Measured and reported, never judged.
    Diagnostic,
}

/// One numeric result with its tolerance and verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Value,
    pub comparison: Comparison,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value: json_f64(value),
            comparison: Comparison::Below,
            tolerance: Some(tolerance),
            pass: Some(value < tolerance),
            witness: None,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { comparison: Comparison::Above, pass: Some(value > tolerance), ..Self::below(name, value, tolerance) }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: Value::from(ok as u8),
            comparison: Comparison::Holds,
            tolerance: None,
            pass: Some(ok),
            witness: None,
        }
    }

    /// `value` is printed as an exact rational; `witness` names a
    /// surviving term when the value is not zero.
    pub fn exact_zero(name: impl Into<String>, value: String, witness: Option<String>) -> Self {
        let pass = witness.is_none() && value == "0";
        Self {
            name: name.into(),
            value: Value::from(value),
            comparison: Comparison::ExactZero,
            tolerance: Some(0.0),
            pass: Some(pass),
            witness,
        }
    }

    pub fn diagnostic(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value: json_f64(value),
            comparison: Comparison::Diagnostic,
            tolerance: None,
            pass: None,
            witness: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

/// Non-finite floats become strings so the report stays valid JSON.
pub fn json_f64(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(x.to_string())
    }
}

/// What a suite hands back to the dispatcher.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub results: Value,
    pub checks: Vec<Check>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub verb: String,
    pub timestamp: String,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub params: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub status: &'static str,
}

impl Report {
    pub fn new(verb: &str, seed: Option<u64>, params: Value, outcome: Outcome) -> Self {
        let status = if outcome.passed() { "pass" } else { "fail" };
        Self {
            schema: SCHEMA,
            verb: verb.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            params,
            results: outcome.results,
            checks: outcome.checks,
            status,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// Append one JSON line to `path`.
    pub fn append_to(&self, path: &Path) -> std::io::Result<()> {
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        writeln!(f, "{}", self.to_line())
    }
}
