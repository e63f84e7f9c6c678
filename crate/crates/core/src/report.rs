//! Structured pass/fail records for admissibility and identity checks.

use serde::{Deserialize, Serialize};

/// One named check with its measured residual and threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    /// Pass iff `measured <= threshold` (non-finite residuals fail).
    pub fn new(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            threshold,
            passed: measured.is_finite() && measured <= threshold,
        }
    }

    /// A check whose verdict was decided externally (e.g. an order estimate
    /// that must be *at least* some value).
    pub fn verdict(name: impl Into<String>, measured: f64, threshold: f64, passed: bool) -> Self {
        Check {
            name: name.into(),
            measured,
            threshold,
            passed,
        }
    }
}

/// A list of checks; `overall` is their conjunction.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn new() -> Self {
        VerificationReport {
            checks: Vec::new(),
            overall: true,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.overall = self.overall && check.passed;
        self.checks.push(check);
    }

    pub fn merge(&mut self, other: VerificationReport) {
        for check in other.checks {
            self.push(check);
        }
    }

    pub fn from_checks(checks: Vec<Check>) -> Self {
        let overall = checks.iter().all(|c| c.passed);
        VerificationReport { checks, overall }
    }
}
