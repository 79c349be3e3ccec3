//! CSV tables and JSON sidecars. Values are written with Rust's shortest
//! round-trip float formatting, so identical runs give identical bytes.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer
            .into_inner()
            .map_err(|e| HarnessError::io("<csv buffer>", e.into_error()))
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| *h == name)?;
        self.rows.iter().map(|r| r[idx].parse().ok()).collect()
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a, R: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub columns: &'a [&'static str],
    pub config: &'a RunConfig,
    pub results: &'a R,
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

/// Writes the CSV to `out` (and the sidecar next to it) or the CSV alone to
/// stdout.
pub fn emit<R: Serialize>(command: &str, config: &RunConfig, table: &Table, results: &R) -> Result<()> {
    let csv = table.to_csv()?;
    match &config.out {
        Some(path) => {
            write_file(path, &csv)?;
            let sidecar = Sidecar {
                schema_version: SCHEMA_VERSION,
                tool: "spinbath",
                version: env!("CARGO_PKG_VERSION"),
                command,
                columns: &table.header,
                config,
                results,
            };
            let mut json = serde_json::to_vec_pretty(&sidecar)?;
            json.push(b'\n');
            write_file(&sidecar_path(path), &json)
        }
        None => std::io::stdout()
            .write_all(&csv)
            .map_err(|e| HarnessError::io("<stdout>", e)),
    }
}
