use std::io::Write;

use sha2::{Digest, Sha256};

use crate::CliError;

/// Formats a float for CSV: shortest round-trip form, in exponent notation
/// outside `[1e-5, 1e16)`, `inf` for infinity.
pub fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else if v.is_nan() {
        "nan".into()
    } else if v != 0.0 && !(1e-5..1e16).contains(&v.abs()) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn config_hash(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// A CSV table with a header comment naming the config hash.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub hash: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(hash: String, header: &[&str]) -> Self {
        Table { hash, header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = Vec::new();
        writeln!(out, "# config-hash sha256:{}", self.hash)?;
        {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(&mut out);
            let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
            w.write_record(&self.header).map_err(io)?;
            for r in &self.rows {
                w.write_record(r).map_err(io)?;
            }
            w.flush()?;
        }
        String::from_utf8(out).map_err(|e| CliError::Compute(e.to_string()))
    }

    /// Reads back a table written by [`Table::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self, CliError> {
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let hash = first
            .trim_end()
            .strip_prefix("# config-hash sha256:")
            .ok_or_else(|| CliError::Compute("missing config-hash line".into()))?
            .to_string();
        let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
        let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
        let header = r.headers().map_err(io)?.iter().map(String::from).collect();
        let rows =
            r.records().map(|rec| rec.map(|rec| rec.iter().map(String::from).collect())).collect::<Result<_, _>>().map_err(io)?;
        Ok(Table { hash, header, rows })
    }
}
