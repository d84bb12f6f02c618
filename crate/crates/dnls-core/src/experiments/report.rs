use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io::{write_atomic, CsvTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// A precondition (guard, support) could not be met; nothing was decided.
    Inconclusive,
    /// Run outside the proven regime (M ≥ 4π); numbers are logged only.
    Exploratory,
}

/// One recorded comparison `value ≤ bound` (or inside `[lower, bound]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub value: f64,
    pub bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn at_most(value: f64, bound: f64) -> Self {
        Self {
            value,
            bound,
            lower: None,
            pass: value <= bound,
        }
    }

    pub fn within(value: f64, lower: f64, bound: f64) -> Self {
        Self {
            value,
            bound,
            lower: Some(lower),
            pass: value >= lower && value <= bound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub parameters: serde_json::Value,
    pub verdict: Verdict,
    pub checks: BTreeMap<String, Check>,
    pub summary: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub artifacts: Vec<String>,
    #[serde(skip)]
    pub tables: Vec<(String, CsvTable)>,
    #[serde(skip)]
    pub curves: Vec<(String, String)>,
}

impl ExperimentReport {
    pub fn new(name: &str, parameters: serde_json::Value) -> Self {
        Self {
            name: name.to_string(),
            parameters,
            verdict: Verdict::Pass,
            checks: BTreeMap::new(),
            summary: BTreeMap::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
            tables: Vec::new(),
            curves: Vec::new(),
        }
    }

    pub fn check(&mut self, key: &str, check: Check) {
        self.checks.insert(key.to_string(), check);
    }

    pub fn record(&mut self, key: &str, value: f64) {
        self.summary.insert(key.to_string(), value);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(&mut self, file: &str, table: CsvTable) {
        self.tables.push((file.to_string(), table));
    }

    pub fn curve(&mut self, file: &str, text: String) {
        self.curves.push((file.to_string(), text));
    }

    /// Sets the verdict from the recorded checks unless a precondition
    /// already marked the run inconclusive or exploratory.
    pub fn conclude(mut self) -> Self {
        if self.verdict == Verdict::Pass || self.verdict == Verdict::Fail {
            self.verdict = if self.checks.values().all(|c| c.pass) {
                Verdict::Pass
            } else {
                Verdict::Fail
            };
        }
        self
    }

    pub fn mark(&mut self, verdict: Verdict, reason: impl Into<String>) {
        self.verdict = verdict;
        self.notes.push(reason.into());
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|(_, c)| !c.pass).map(|(k, _)| k.as_str()).collect()
    }

    /// report.json plus every table and curve, written atomically into `dir`.
    pub fn write(&mut self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        self.artifacts = self.tables.iter().map(|(f, _)| f.clone()).chain(self.curves.iter().map(|(f, _)| f.clone())).collect();
        for (file, table) in &self.tables {
            let p = dir.join(file);
            table.write(&p)?;
            written.push(p);
        }
        for (file, text) in &self.curves {
            let p = dir.join(file);
            write_atomic(&p, text.as_bytes())?;
            written.push(p);
        }
        let p = dir.join("report.json");
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        write_atomic(&p, json.as_bytes())?;
        written.push(p);
        Ok(written)
    }
}
