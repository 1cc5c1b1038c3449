//! Versioned key/value result documents and curve CSVs.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

use super::dominance::DominanceVerdict;

pub const DOCUMENT_FORMAT: &str = "heavytail-result";
pub const DOCUMENT_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Ordered `key = value` lines, starting with the format header.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultDocument {
    entries: Vec<(String, String)>,
}

fn list(values: &[f64]) -> String {
    let mut s = String::with_capacity(values.len() * 12);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        let _ = write!(s, "{v:e}");
    }
    s
}

impl ResultDocument {
    /// A document carrying the format, version, tool version and anchor id.
    pub fn new(anchor: &str) -> Self {
        let mut d = ResultDocument::default();
        d.push("format", DOCUMENT_FORMAT);
        d.push("version", DOCUMENT_VERSION);
        d.push("tool_version", TOOL_VERSION);
        d.push("anchor", anchor);
        d
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string().replace('\n', " ");
        self.entries.push((key.to_string(), value));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Appends the verdict fields under `prefix`.
    pub fn push_verdict(&mut self, prefix: &str, v: &DominanceVerdict) -> &mut Self {
        let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
        self.push(&key("relation"), v.label());
        self.push(&key("confidence"), v.confidence);
        self.push(&key("n_low"), v.n_low);
        self.push(&key("n_high"), v.n_high);
        self.push(&key("epsilon"), format!("{:e}", v.epsilon));
        self.push(&key("min_slack"), format!("{:e}", v.min_slack()));
        self.push(&key("strictness"), format!("{:e}", v.strictness));
        self.push(&key("grid_points"), v.grid.len());
        self.push(&key("grid"), list(&v.grid));
        self.push(&key("band"), list(&v.band));
        self.push(&key("margins"), list(&v.margins));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut d = ResultDocument::default();
        for (no, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| Error::Input(format!("line {}: expected 'key = value'", no + 1)))?;
            d.entries.push((k.to_string(), v.to_string()));
        }
        if d.get("format") != Some(DOCUMENT_FORMAT) {
            return Err(Error::Input("not a result document".into()));
        }
        Ok(d)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.render().as_bytes())?;
        Ok(())
    }
}

/// Writes `x, low, high, margin, band` rows of a verdict. For FSD the curve
/// columns are survival probabilities; for SSD they are integrated CDFs.
pub fn write_verdict_csv(path: &Path, v: &DominanceVerdict, low_curve: &[f64], high_curve: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "low", "high", "margin", "band"])?;
    for i in 0..v.grid.len() {
        w.write_record([
            format!("{:e}", v.grid[i]),
            format!("{:e}", low_curve[i]),
            format!("{:e}", high_curve[i]),
            format!("{:e}", v.margins[i]),
            format!("{:e}", v.band[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}
