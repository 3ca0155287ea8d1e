//! Versioned CSV tables.
//!
//! Every file starts with a comment line `# eedesign-csv v1 kind=<kind>`
//! followed by optional `key=value` metadata, then a header row. Column
//! order is fixed per kind and floats are written with 17 significant
//! digits, so reruns with the same inputs are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Result, SimError};

pub const SCHEMA_VERSION: u32 = 1;

/// Round-trip exact rendering of a float.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A table of one kind, built row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    kind: &'static str,
    meta: Vec<(String, String)>,
    columns: &'static [&'static str],
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(kind: &'static str, columns: &'static [&'static str]) -> Self {
        Self { kind, meta: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    /// Appends a row; panics if its width does not match the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width of {} table", self.kind);
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    pub fn comment_line(&self) -> String {
        let mut line = format!("# eedesign-csv v{SCHEMA_VERSION} kind={}", self.kind);
        for (k, v) in &self.meta {
            line.push_str(&format!(" {k}={v}"));
        }
        line
    }

    pub fn write_to(&self, out: impl Write) -> Result<()> {
        let mut out = out;
        writeln!(out, "{}", self.comment_line()).map_err(csv::Error::from)?;
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        writer.write_record(self.columns)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| SimError::Io { path: path.to_path_buf(), source })?;
        self.write_to(BufWriter::new(file))
    }
}

pub const OPTIMUM_COLUMNS: &[&str] = &[
    "method",
    "M",
    "K",
    "rho",
    "ee",
    "ee_mbit_per_joule",
    "sum_rate",
    "tx_energy",
    "total_power",
    "iterations",
];

pub const TRAJECTORY_COLUMNS: &[&str] = &["iteration", "stage", "M", "K", "rho", "ee", "ee_mbit_per_joule"];

pub const SURFACE_COLUMNS: &[&str] =
    &["scheme", "csi", "M", "K", "rho", "ee", "ee_mbit_per_joule", "sum_rate", "tx_energy", "trials"];

pub const SWEEP_COLUMNS: &[&str] = &[
    "scheme",
    "csi",
    "M",
    "K",
    "rho",
    "tx_energy",
    "tx_power_w",
    "ee",
    "ee_mbit_per_joule",
    "sum_rate",
    "trials",
    "flat",
];

pub const SIMULATE_COLUMNS: &[&str] = &[
    "scheme",
    "csi",
    "M",
    "K",
    "rho",
    "rate_per_ue",
    "sum_rate",
    "tx_energy",
    "total_power",
    "ee",
    "trials",
    "seed",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.0, 1.0 / 3.0, 7_527_867.611_724_959, 1e-300, -2.5e17, f64::MIN_POSITIVE] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(0.1), "1.0000000000000001e-1");
    }

    #[test]
    fn layout() {
        let mut t = Table::new("trajectory", TRAJECTORY_COLUMNS).meta("seed", 4);
        t.push(vec!["0".into(), "initial".into(), "3".into(), "1".into(), float(1.0), float(2.0), float(2e-6)]);
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# eedesign-csv v1 kind=trajectory seed=4");
        assert_eq!(lines[1], "iteration,stage,M,K,rho,ee,ee_mbit_per_joule");
        assert!(lines[2].starts_with("0,initial,3,1,1.0000000000000000e0,"));
        assert_eq!(lines.len(), 3);
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn row_width_is_checked() {
        Table::new("trajectory", TRAJECTORY_COLUMNS).push(vec!["1".into()]);
    }
}
