//! Tabular reports with a commented header, written as CSV or JSON.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use volspec::spectral::KernelDiagnostics;
use volspec::{ModelConfig, Result};

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Six significant digits, positional when the magnitude is moderate.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if (1e-4..1e6).contains(&mag) {
        format!("{rounded}")
    } else {
        format!("{rounded:.5e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => sig6(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }
}

/// Worst-case health of everything a command computed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Diagnostics {
    pub max_mass_error: f64,
    pub min_entry: f64,
    pub residue: f64,
    pub leakage: Option<f64>,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Self {
            max_mass_error: 0.0,
            min_entry: 0.0,
            residue: 0.0,
            leakage: None,
        }
    }
}

impl Diagnostics {
    pub fn kernel(&mut self, d: KernelDiagnostics) {
        self.max_mass_error = self.max_mass_error.max(d.max_row_sum_error);
        self.min_entry = self.min_entry.min(d.min_entry);
        self.residue = self.residue.max(d.imaginary_residue);
    }

    pub fn leakage(&mut self, leak: f64) {
        self.leakage = Some(self.leakage.map_or(leak, |l: f64| l.max(leak)));
    }

    /// Kernel validity: mass within 1e-8, entries above -1e-10, residue
    /// below 1e-8.
    pub fn violation(&self) -> Option<String> {
        let d = KernelDiagnostics {
            max_row_sum_error: self.max_mass_error,
            min_entry: self.min_entry,
            imaginary_residue: self.residue,
        };
        (!d.is_valid()).then(|| format!("kernel guard tripped: {}", self.line()))
    }

    fn line(&self) -> String {
        let leak = self.leakage.map_or_else(|| "n/a".to_string(), |l| format!("{l:.3e}"));
        format!(
            "mass_error={:.3e} min_entry={:.3e} residue={:.3e} leakage={leak}",
            self.max_mass_error, self.min_entry, self.residue
        )
    }
}

pub struct Report {
    pub command: &'static str,
    pub notes: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub diagnostics: Diagnostics,
    /// Extra structured payload for the JSON form.
    pub extra: Option<Value>,
}

impl Report {
    pub fn new(command: &'static str, columns: &[&str]) -> Self {
        Self::with_columns(command, columns.iter().map(|c| c.to_string()).collect())
    }

    pub fn with_columns(command: &'static str, columns: Vec<String>) -> Self {
        Self {
            command,
            notes: Vec::new(),
            columns,
            rows: Vec::new(),
            diagnostics: Diagnostics::default(),
            extra: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, config_hash: &str, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "# volspec {}", self.command)?;
        writeln!(out, "# config_sha256: {config_hash}")?;
        writeln!(out, "# diagnostics: {}", self.diagnostics.line())?;
        for note in &self.notes {
            writeln!(out, "# {note}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, config_hash: &str) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                          .map(|(c, v)| (c.clone(), serde_json::to_value(v).expect("cell serializes")))
                        .collect(),
                )
            })
            .collect();
        let mut v = json!({
            "command": self.command,
            "config_sha256": config_hash,
            "diagnostics": self.diagnostics,
            "notes": self.notes,
            "rows": rows,
        });
        if let Some(extra) = &self.extra {
            v["extra"] = extra.clone();
        }
        v
    }
}

pub fn config_hash(config: &ModelConfig) -> Result<String> {
    let text = config.to_json()?;
    Ok(Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}
