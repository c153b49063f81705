//! Buffered outputs written atomically, with a checksummed manifest.

use std::io::Write;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::CliError;

/// Outputs of one run, held in memory until every computation has succeeded.
#[derive(Debug, Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

#[derive(Debug, Serialize)]
struct ManifestEntry<'a> {
    file: &'a str,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    outputs: Vec<ManifestEntry<'a>>,
}

fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

impl Artifacts {
    /// Adds a table as `<stem>.csv` or `<stem>.json` (array of records).
    pub fn table<R: Serialize>(&mut self, stem: &str, format: Format, rows: &[R]) -> Result<(), CliError> {
        let (name, bytes) = match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                for row in rows {
                    w.serialize(row).map_err(|e| CliError::Io(e.to_string()))?;
                }
                let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
                (format!("{stem}.csv"), bytes)
            }
            Format::Json => (format!("{stem}.json"), json_bytes(rows)?),
        };
        self.files.push((name, bytes));
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        self.files.push((name.to_string(), json_bytes(value)?));
        Ok(())
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    /// Writes every file, then `manifest.json` and the `timing.json` sidecar.
    pub fn commit(self, config: &RunConfig, elapsed: Duration) -> Result<(), CliError> {
        let dir = &config.output.dir;
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        let outputs = self
            .files
            .iter()
            .map(|(name, bytes)| ManifestEntry {
                file: name,
                bytes: bytes.len(),
                sha256: hex::encode(Sha256::digest(bytes)),
            })
            .collect();
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config,
            outputs,
        };
        let manifest_bytes = json_bytes(&manifest)?;
        for (name, bytes) in &self.files {
            write_atomic(dir, name, bytes)?;
        }
        write_atomic(dir, "manifest.json", &manifest_bytes)?;
        let timing = serde_json::json!({ "wall_clock_seconds": elapsed.as_secs_f64() });
        write_atomic(dir, "timing.json", &json_bytes(&timing)?)
    }
}

/// Writes to a temporary file in `dir` and renames it into place.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.join(name).display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(dir.join(name)).map_err(|e| io(e.error))?;
    Ok(())
}
