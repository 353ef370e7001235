//! Machine-readable run reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub stats: BTreeMap<String, Value>,
}

impl Check {
    pub fn new(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
            detail: detail.into(),
            stats: BTreeMap::new(),
        }
    }

    pub fn stat(mut self, key: &str, value: impl Serialize) -> Self {
        self.stats
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.stats.get(key).and_then(Value::as_f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub config: RunConfig,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(suite: &str, checks: Vec<Check>, config: &RunConfig, wall_time_s: f64) -> Self {
        Self {
            suite: suite.to_string(),
            passed: checks.iter().all(Check::passed),
            checks,
            provenance: Provenance {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: config.clone(),
                wall_time_s,
            },
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line per check plus a verdict line.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "[{tag}] {}/{}: {}", self.suite, c.name, c.detail);
        }
        let verdict = if self.passed { "passed" } else { "FAILED" };
        let _ = writeln!(
            s,
            "{} {verdict} ({} checks, {:.2}s)",
            self.suite,
            self.checks.len(),
            self.provenance.wall_time_s
        );
        s
    }

    pub fn to_json(&self) -> anyhow::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_json()? + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}
