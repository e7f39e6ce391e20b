//! Artifact writers: tables as CSV or JSON, plus the run manifest.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::CliConfig;

/// On-disk table format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Comma-separated with a mandatory header row.
    Csv,
    /// Array of objects keyed by the header names.
    Json,
}

/// A finished table ready to be written.
pub struct Table {
    /// File stem, e.g. "ber" becomes ber.csv or ber.json.
    pub name: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, header: Vec<&'static str>) -> Self {
        Table {
            name,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Writes the table under `dir`, returning the path written.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<PathBuf, String> {
        let (ext, body) = match format {
            OutputFormat::Csv => ("csv", self.to_csv()),
            OutputFormat::Json => ("json", self.to_json()),
        };
        let path = dir.join(format!("{}.{ext}", self.name));
        std::fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))?;
        Ok(path)
    }

    fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                self.header
                    .iter()
                    .zip(row)
                    .map(|(k, v)| ((*k).to_string(), serde_json::Value::String(v.clone())))
                    .collect::<serde_json::Map<_, _>>()
                    .into()
            })
            .collect();
        let mut body = serde_json::to_string_pretty(&objects).expect("string table");
        body.push('\n');
        body
    }
}

/// Formats a float cell; plain shortest round-trip decimal notation.
pub fn cell(x: f64) -> String {
    format!("{x}")
}

/// Formats an optional float cell; empty when absent.
pub fn cell_opt(x: Option<f64>) -> String {
    x.map(cell).unwrap_or_default()
}

/// Record of one successful invocation.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// The effective configuration, with command-line overrides applied;
    /// parsing it back yields the run's exact inputs.
    pub config: CliConfig,
    pub master_seed: u64,
    pub tool_version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    /// Every table written by the run.
    pub outputs: Vec<String>,
}

/// Milliseconds since the Unix epoch.
pub fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0)
}

/// Writes `manifest.json` under `dir`.
pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf, String> {
    let path = dir.join("manifest.json");
    let mut body =
        serde_json::to_string_pretty(manifest).map_err(|e| format!("manifest: {e}"))?;
    body.push('\n');
    std::fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(path)
}
