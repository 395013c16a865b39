//! JSON reports. Field order is fixed by the struct layout, checks are sorted
//! by name and maps are ordered, so equal runs give equal bytes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::Tolerances;
use crate::{EXIT_FAIL, EXIT_PASS};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst residual over the samples; `None` when an evaluation failed.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub samples: Vec<Vec<f64>>,
    pub error: Option<String>,
    pub details: BTreeMap<String, String>,
}

impl Check {
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, samples: Vec<Vec<f64>>) -> Self {
        Check {
            name: name.into(),
            residual: Some(residual),
            tolerance,
            pass: residual.is_finite() && residual <= tolerance,
            samples,
            error: None,
            details: BTreeMap::new(),
        }
    }

    pub fn failed(name: impl Into<String>, tolerance: f64, samples: Vec<Vec<f64>>, error: String) -> Self {
        Check {
            name: name.into(),
            residual: None,
            tolerance,
            pass: false,
            samples,
            error: Some(error),
            details: BTreeMap::new(),
        }
    }

    pub fn with_detail(mut self, key: &str, value: impl Into<String>) -> Self {
        self.details.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub parameters: BTreeMap<String, f64>,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub model: String,
    pub verdict: String,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(command: &str, model: &str, mut checks: Vec<Check>, provenance: Provenance) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let verdict = if checks.iter().all(|c| c.pass) { "pass" } else { "fail" };
        Report {
            command: command.to_string(),
            model: model.to_string(),
            verdict: verdict.to_string(),
            checks,
            provenance,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == "pass"
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }
}
