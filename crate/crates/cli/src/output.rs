//! CSV and manifest output.
//!
//! Numeric fields are printed with 17 significant digits, '.' decimal,
//! no locale, so identical runs produce byte-identical data files. The
//! manifest carries run metadata plus a SHA-256 digest of every data file;
//! timings live only in the manifest, never in the CSV.

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

/// 17-significant-digit float formatting for data files.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// A CSV file accumulated in memory and flushed once.
pub struct CsvFile {
    path: PathBuf,
    buffer: String,
    columns: usize,
}

impl CsvFile {
    pub fn new(path: &Path, header: &[&str]) -> Self {
        let mut buffer = String::new();
        buffer.push_str(&header.join(","));
        buffer.push('\n');
        Self {
            path: path.to_path_buf(),
            buffer,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "row width mismatch");
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    /// Write the file and return its digest record.
    pub fn finish(self) -> Result<OutputDigest> {
        let mut file = std::fs::File::create(&self.path)
            .with_context(|| format!("creating {}", self.path.display()))?;
        file.write_all(self.buffer.as_bytes())?;
        let digest = Sha256::digest(self.buffer.as_bytes());
        Ok(OutputDigest {
            path: self.path.display().to_string(),
            sha256: format!("{digest:x}"),
            bytes: self.buffer.len(),
        })
    }

    /// The accumulated text, for printing to stdout instead of a file.
    pub fn into_buffer(self) -> String {
        self.buffer
    }
}

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Metadata for one run: inputs, per-point status, timing, output digests.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: Vec<String>,
    pub master_seed: Option<u64>,
    pub parameter_grid: serde_json::Value,
    pub started_unix_ms: u128,
    pub wall_seconds: f64,
    pub points: Vec<PointStatus>,
    pub outputs: Vec<OutputDigest>,
}

#[derive(Debug, Serialize)]
pub struct PointStatus {
    pub params: String,
    pub status: String,
}

impl RunManifest {
    pub fn new(grid: serde_json::Value, master_seed: Option<u64>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: std::env::args().collect(),
            master_seed,
            parameter_grid: grid,
            started_unix_ms: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_millis())
                .unwrap_or(0),
            wall_seconds: 0.0,
            points: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn point_ok(&mut self, params: impl Into<String>) {
        self.points.push(PointStatus {
            params: params.into(),
            status: "ok".to_string(),
        });
    }

    pub fn point_failed(&mut self, params: impl Into<String>, error: impl std::fmt::Display) {
        self.points.push(PointStatus {
            params: params.into(),
            status: format!("error: {error}"),
        });
    }

    pub fn any_failed(&self) -> bool {
        self.points.iter().any(|p| p.status != "ok")
    }

    /// Serialize next to the primary output as `<out>.manifest.json`.
    pub fn write(mut self, out: &Path, wall_seconds: f64) -> Result<()> {
        self.wall_seconds = wall_seconds;
        let path = manifest_path(out);
        let json = serde_json::to_string_pretty(&self)?;
        std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}
