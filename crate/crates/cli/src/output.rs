//! Result emission with an embedded run manifest.
//!
//! Files written with `--out` carry the manifest: CSV gets it as a leading
//! `# manifest: {...}` comment line, JSON wraps the result as
//! `{"manifest": ..., "result": ...}`. Interleaver files keep their bare
//! format and get a `<out>.manifest.json` sidecar instead. Output on stdout
//! is the bare result.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub params: Value,
    pub seed: u64,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(subcommand: &str, params: Value, seed: u64) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_owned(),
            params,
            seed,
            timestamp_unix: timestamp(),
        }
    }
}

fn timestamp() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        return t;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Tabular result: CSV rows plus the structured JSON form.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub json: Value,
}

pub struct Sink {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub manifest: RunManifest,
}

impl Sink {
    pub fn emit(&self, table: &Table) -> Result<()> {
        let bytes = match self.format {
            Format::Csv => self.csv_bytes(table)?,
            Format::Json => self.json_bytes(&table.json)?,
        };
        self.write(&bytes)
    }

    fn csv_bytes(&self, table: &Table) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        if self.out.is_some() {
            writeln!(buf, "# manifest: {}", serde_json::to_string(&self.manifest)?)?;
        }
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        drop(w);
        Ok(buf)
    }

    fn json_bytes(&self, result: &Value) -> Result<Vec<u8>> {
        let doc = if self.out.is_some() {
            json!({ "manifest": self.manifest, "result": result })
        } else {
            result.clone()
        };
        let mut buf = serde_json::to_vec_pretty(&doc)?;
        buf.push(b'\n');
        Ok(buf)
    }

    /// Raw bytes in a fixed format; the manifest goes to a sidecar file.
    pub fn emit_raw(&self, bytes: &[u8]) -> Result<()> {
        self.write(bytes)?;
        if let Some(path) = &self.out {
            let mut side = serde_json::to_vec_pretty(&self.manifest)?;
            side.push(b'\n');
            let side_path = sidecar(path);
            fs::write(&side_path, side).with_context(|| format!("cannot write {}", side_path.display()))?;
        }
        Ok(())
    }

    fn write(&self, bytes: &[u8]) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display())),
            None => {
                let mut stdout = io::stdout().lock();
                stdout.write_all(bytes)?;
                stdout.flush()?;
                Ok(())
            }
        }
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Space-separated list, used for vector-valued CSV cells.
pub fn joined<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}
