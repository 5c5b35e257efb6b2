//! The JSON document written by every command.

use std::collections::BTreeMap;

use moikit_core::suite::SuiteReport;
use moikit_core::{MatrixFile, VerificationReport};
use serde::Serialize;

use crate::config::RunConfig;

/// Field order is the serialization order. Everything except `timings` is a
/// deterministic function of the configuration.
#[derive(Debug, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: RunConfig,
    pub pass: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub reports: Vec<VerificationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<MatrixFile>,
    /// Wall-clock seconds by phase.
    pub timings: BTreeMap<String, f64>,
}

impl ReportDocument {
    pub fn new(config: RunConfig) -> Self {
        Self {
            tool: "moikit",
            version: env!("CARGO_PKG_VERSION"),
            command: config.command.name(),
            config,
            pass: true,
            reports: Vec::new(),
            suite: None,
            result: None,
            timings: BTreeMap::new(),
        }
    }

    /// Overall pass is the conjunction of every check.
    pub fn finalize(&mut self) {
        self.pass =
            self.reports.iter().all(|r| r.pass) && self.suite.as_ref().is_none_or(|s| s.pass);
    }

    pub fn check_count(&self) -> usize {
        self.reports.iter().map(|r| r.checks.len()).sum::<usize>()
            + self.suite.as_ref().map_or(0, |s| s.checks().count())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }
}
