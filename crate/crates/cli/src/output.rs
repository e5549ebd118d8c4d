//! Result artifacts: one record table per run, written as CSV and/or JSON,
//! plus a resolved-scenario copy. Metrics are kept in a BTreeMap so output
//! bytes are deterministic for a fixed seed.

use crate::scenario::{OutputFormat, Scenario};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// A rectangular record table.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// What an engine run produced.
#[derive(Debug, Clone)]
pub struct EngineOutcome {
    /// One-line human summary (without the PASS/FAIL tag).
    pub summary: String,
    /// Did every scenario-declared tolerance hold?
    pub pass: bool,
    /// Named scalar results, ordered.
    pub metrics: BTreeMap<String, f64>,
    pub tables: Vec<Table>,
}

impl EngineOutcome {
    pub fn new(summary: impl Into<String>, pass: bool) -> Self {
        Self {
            summary: summary.into(),
            pass,
            metrics: BTreeMap::new(),
            tables: Vec::new(),
        }
    }
}

/// Format a float with shortest round-trip representation (deterministic
/// for a given binary and input bits).
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub struct Writer {
    pub dir: PathBuf,
    pub stem: String,
    pub formats: Vec<OutputFormat>,
}

impl Writer {
    pub fn new(scenario: &Scenario, label: Option<&str>) -> Self {
        let stamp = match label {
            Some(l) => l.to_string(),
            None => {
                let now = std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                format!("{now}")
            }
        };
        Self {
            dir: PathBuf::from(&scenario.output.dir),
            stem: format!("{}_{}", scenario.engine.name(), stamp),
            formats: scenario.output.formats.clone(),
        }
    }

    pub fn with_out_dir(mut self, dir: Option<&str>) -> Self {
        if let Some(d) = dir {
            self.dir = PathBuf::from(d);
        }
        self
    }

    /// Write all artifacts; returns the file paths written.
    pub fn write(
        &self,
        outcome: &EngineOutcome,
        resolved: &Scenario,
    ) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.dir)?;
        let mut written = Vec::new();
        for fmt in &self.formats {
            match fmt {
                OutputFormat::Csv => {
                    for table in &outcome.tables {
                        let path = self.table_path(&table.name, "csv");
                        let mut f = fs::File::create(&path)?;
                        writeln!(f, "{}", table.header.join(","))?;
                        for row in &table.rows {
                            writeln!(f, "{}", row.join(","))?;
                        }
                        written.push(path);
                    }
                }
                OutputFormat::Json => {
                    let path = self.dir.join(format!("{}.json", self.stem));
                    let doc = serde_json::json!({
                        "engine": resolved.engine.name(),
                        "seed": resolved.seed,
                        "pass": outcome.pass,
                        "summary": outcome.summary,
                        "metrics": outcome.metrics,
                        "tables": outcome.tables.iter().map(|t| {
                            serde_json::json!({
                                "name": t.name,
                                "header": t.header,
                                "rows": t.rows,
                            })
                        }).collect::<Vec<_>>(),
                    });
                    fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
                    written.push(path);
                }
            }
        }
        // Resolved-scenario copy (overrides applied) for reproducibility.
        let path = self.dir.join(format!("{}_scenario.json", self.stem));
        fs::write(&path, serde_json::to_string_pretty(resolved)?)?;
        written.push(path);
        Ok(written)
    }

    fn table_path(&self, table: &str, ext: &str) -> PathBuf {
        Path::new(&self.dir).join(format!("{}_{}.{}", self.stem, table, ext))
    }
}
