//! Deterministic writers for CSV tables, sidecar metadata, and failure
//! manifests.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cli::config::RunConfig;
use crate::{Error, Result};

/// Canonical float rendering: 17 significant digits, enough to round-trip
/// any f64 bit pattern.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes a CSV table with a single header row. Rows are written in the
/// order given; callers are responsible for grid ordering.
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    writer
        .write_record(header)
        .map_err(|e| Error::Solver(format!("csv write failed: {e}")))?;
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        let rendered: Vec<String> = row.iter().map(|&x| fmt_float(x)).collect();
        writer
            .write_record(&rendered)
            .map_err(|e| Error::Solver(format!("csv write failed: {e}")))?;
    }
    writer
        .flush()
        .map_err(|e| Error::Solver(format!("csv flush failed: {e}")))?;
    Ok(())
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".failures.json");
    PathBuf::from(name)
}

#[derive(Serialize)]
struct Sidecar<'a> {
    config: &'a RunConfig,
    diagnostics: serde_json::Value,
}

/// Writes `{out}.meta.json` echoing the resolved config together with
/// run diagnostics. The document parses back through `--config`.
pub fn write_sidecar(out: &Path, config: &RunConfig, diagnostics: serde_json::Value) -> Result<()> {
    let doc = Sidecar { config, diagnostics };
    let mut file = BufWriter::new(File::create(sidecar_path(out))?);
    serde_json::to_writer_pretty(&mut file, &doc)
        .map_err(|e| Error::Solver(format!("sidecar serialization failed: {e}")))?;
    file.write_all(b"\n")?;
    file.flush()?;
    Ok(())
}

/// One failed grid point, kept machine-readable.
#[derive(Serialize)]
pub struct FailureRecord {
    pub index: usize,
    pub value: f64,
    pub error: String,
    pub exit_code: i32,
}

/// Writes `{out}.failures.json` when a sweep only partially succeeded, or
/// removes a stale manifest from an earlier run when it fully succeeded.
pub fn write_failure_manifest(out: &Path, failures: &[FailureRecord]) -> Result<()> {
    let path = manifest_path(out);
    if failures.is_empty() {
        match std::fs::remove_file(&path) {
            Ok(()) => {}
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        return Ok(());
    }
    let mut file = BufWriter::new(File::create(&path)?);
    serde_json::to_writer_pretty(&mut file, failures)
        .map_err(|e| Error::Solver(format!("manifest serialization failed: {e}")))?;
    file.write_all(b"\n")?;
    file.flush()?;
    Ok(())
}
