//! Result tables, pass/fail checks and their CSV/JSON serialization.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Section {
    pub fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `< 1e-6`.
    pub criterion: String,
    pub passed: bool,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            criterion: format!("< {tol:e}"),
            passed: value < tol,
        }
    }

    pub fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            criterion: format!("in [{lo}, {hi}]"),
            passed: (lo..=hi).contains(&value),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool, criterion: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: if passed { 1.0 } else { 0.0 },
            criterion: criterion.into(),
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub sections: Vec<Section>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            sections: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn render(&self, format: Format, config: &[(&'static str, String)]) -> String {
        match format {
            Format::Csv => self.to_csv(config),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(config)).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    /// `#` metadata lines, then per section a `# section:` marker, a header
    /// row and the data, then the checks.
    pub fn to_csv(&self, config: &[(&'static str, String)]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# command: {}", self.command);
        for (k, v) in config {
            let _ = writeln!(out, "# {k} = {v}");
        }
        for s in &self.sections {
            let _ = writeln!(out, "# section: {}", s.name);
            let _ = writeln!(out, "{}", s.columns.join(","));
            for row in &s.rows {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
                let _ = writeln!(out, "{}", cells.join(","));
            }
        }
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "# check: {} = {:.16e} ({}) {verdict}",
                c.name, c.value, c.criterion
            );
        }
        let _ = writeln!(out, "# result: {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }

    pub fn to_json(&self, config: &[(&'static str, String)]) -> Value {
        let config: serde_json::Map<String, Value> = config
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
            .collect();
        let sections: Vec<Value> = self
            .sections
            .iter()
            .map(|s| json!({ "name": s.name, "columns": s.columns, "rows": s.rows }))
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| json!({ "name": c.name, "value": c.value, "criterion": c.criterion, "passed": c.passed }))
            .collect();
        json!({
            "header": { "command": self.command, "config": config },
            "sections": sections,
            "checks": checks,
            "passed": self.passed(),
        })
    }
}

/// Writes through a sibling temporary file and renames it into place, so a
/// reader never sees a partial table.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
