//! Deterministic CSV and JSON emission: fixed float formatting (12
//! significant digits), LF line endings, stable field order.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// 12 significant digits, locale-independent.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.11e}")
}

pub struct CsvWriter {
    out: BufWriter<File>,
    columns: usize,
    rows: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> std::io::Result<Self> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(header.join(",").as_bytes())?;
        out.write_all(b"\n")?;
        Ok(Self { out, columns: header.len(), rows: 0 })
    }

    pub fn row(&mut self, values: &[f64]) -> std::io::Result<()> {
        assert_eq!(values.len(), self.columns, "row width must match header");
        let line: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
        self.out.write_all(line.join(",").as_bytes())?;
        self.out.write_all(b"\n")?;
        self.rows += 1;
        Ok(())
    }

    /// Mixed row for columns that are not all floats (e.g. integer s).
    pub fn raw_row(&mut self, values: &[String]) -> std::io::Result<()> {
        assert_eq!(values.len(), self.columns, "row width must match header");
        self.out.write_all(values.join(",").as_bytes())?;
        self.out.write_all(b"\n")?;
        self.rows += 1;
        Ok(())
    }

    pub fn finish(mut self) -> std::io::Result<usize> {
        self.out.flush()?;
        Ok(self.rows)
    }
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(serde_json::to_string_pretty(value).expect("serializable").as_bytes())?;
    out.write_all(b"\n")?;
    out.flush()
}

pub fn library_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}
