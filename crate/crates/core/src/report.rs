//! Structured records of identity and inequality checks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One checked identity or inequality.
///
/// For identities `residual` is a distance between the two sides; for
/// inequalities `lhs <= rhs` it is the excess `lhs - rhs` and `tolerance`
/// the admitted slack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    /// Identity check given both sides' magnitudes and their distance.
    pub fn compare(
        name: impl Into<String>,
        anchor: impl Into<String>,
        lhs: f64,
        rhs: f64,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            residual,
            tolerance,
            // NaN residuals fail
            pass: residual <= tolerance,
        }
    }

    /// A residual that should vanish.
    pub fn residual(
        name: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self::compare(name, anchor, residual, 0.0, residual, tolerance)
    }

    /// `value <= limit` up to `slack`.
    pub fn bound(
        name: impl Into<String>,
        anchor: impl Into<String>,
        value: f64,
        limit: f64,
        slack: f64,
    ) -> Self {
        Self::compare(name, anchor, value, limit, value - limit, slack)
    }
}

/// Outcome of a group of checks; passes iff every check passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub anchor: String,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    /// Informational quantities (slack, radii, estimates) that are not checks.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn new(
        name: impl Into<String>,
        anchor: impl Into<String>,
        checks: Vec<CheckRecord>,
    ) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            name: name.into(),
            anchor: anchor.into(),
            checks,
            pass,
            metrics: BTreeMap::new(),
        }
    }

    pub fn with_metric(mut self, name: impl Into<String>, value: f64) -> Self {
        self.metrics.insert(name.into(), value);
        self
    }

    /// The first (usually only) check, for single-check reports.
    pub fn primary(&self) -> &CheckRecord {
        &self.checks[0]
    }
}
