//! CSV and JSON rendering.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::Failure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// 17 significant digits, locale-free; `-0` prints as `0`.
pub fn number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn cell(x: Option<f64>) -> String {
    x.map(number).unwrap_or_default()
}

#[derive(Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let _ = writeln!(out, "{}", line.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
        }
        out
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::invalid(format!("cannot encode report: {e}")))
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::invalid(format!("cannot write output: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(number(0.5), "5.0000000000000000e-1");
        assert_eq!(number(-0.0), "0.0000000000000000e0");
        assert_eq!(number(0.1).parse::<f64>().unwrap(), 0.1);
        assert_eq!(cell(None), "");
    }

    #[test]
    fn quoting() {
        let mut t = Table::new(["a", "negativity[a|tA]"]);
        t.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.render(), "a,negativity[a|tA]\n1,\"x,y\"\n");
    }
}
