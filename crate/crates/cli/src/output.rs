//! CSV and JSON writers with a `#` metadata preamble.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the canonical JSON serialization of a config.
pub fn digest<T: serde::Serialize>(config: &T) -> Result<String> {
    let text = serde_json::to_string(config)?;
    Ok(format!("{:x}", Sha256::digest(text.as_bytes())))
}

/// Rule by which a seed expands into per-batch random streams.
pub const SPLITTING_RULE: &str = "ChaCha8 seeded with the seed, stream (n << 32) | batch, 256 samples per batch";

pub struct Table {
    meta: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &str, header: &[&str]) -> Self {
        Table {
            meta: vec![format!("entropyforge {} {command}", env!("CARGO_PKG_VERSION"))],
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, line: impl Into<String>) -> &mut Self {
        self.meta.push(line.into());
        self
    }

    pub fn push_header(&mut self, column: &str) {
        self.header.push(column.to_string());
    }

    pub fn row(&mut self, values: Vec<String>) {
        debug_assert_eq!(values.len(), self.header.len());
        self.rows.push(values);
    }

    pub fn write(&self, out: Option<&Path>) -> Result<()> {
        let sink: Box<dyn Write> = match out {
            Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
            None => Box::new(io::stdout().lock()),
        };
        let mut sink = sink;
        for m in &self.meta {
            writeln!(sink, "# {m}")?;
        }
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn write_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display()))?,
        None => writeln!(io::stdout().lock(), "{text}")?,
    }
    Ok(())
}

/// Reads a CSV written by [`Table::write`], skipping metadata lines.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|x| x.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok((header, rows))
}
