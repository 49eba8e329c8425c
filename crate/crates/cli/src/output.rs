//! CSV and JSON writers.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

/// In-memory CSV with a one-line header, LF line endings and every float
/// printed with 17 significant digits.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self { text: format!("{}\n", header.join(",")) }
    }

    pub fn row_f64(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(self.text, "{}", cells.join(","));
    }

    /// Row led by an integer column.
    pub fn row(&mut self, index: usize, values: &[f64]) {
        let _ = write!(self.text, "{index},");
        self.row_f64(values);
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

/// Destination of the main output. With `--out` the summary is written
/// alongside as `<out>.json`; without it everything goes to stdout and the
/// summary is dropped.
pub struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Self { out }
    }

    pub fn write_text(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                if !text.ends_with('\n') {
                    stdout.write_all(b"\n")?;
                }
                Ok(())
            }
        }
    }

    pub fn write_csv(&self, csv: &Csv) -> Result<()> {
        self.write_text(csv.as_str())
    }

    pub fn write_summary<T: Serialize>(&self, summary: &T) -> Result<()> {
        let Some(out) = &self.out else { return Ok(()) };
        let path = out.with_extension("json");
        let text = serde_json::to_string_pretty(summary)? + "\n";
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
    }
}
