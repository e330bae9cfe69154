//! Calibration CSV ingestion: `qubit_id,t1_us,t2_us`.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use planar_qec::{coefficient_of_variation, QubitSpec};
use serde::Serialize;

use crate::error::CliError;

pub const HEADER: [&str; 3] = ["qubit_id", "t1_us", "t2_us"];

/// One input row, with the original tokens kept for re-emission.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub line: u64,
    pub raw: [String; 3],
    pub qubit_id: u32,
    pub t1_us: f64,
    pub t2_us: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub rows: Vec<CalibrationRow>,
    /// Clamped specs, in file order.
    pub specs: Vec<QubitSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub cv: f64,
}

impl Range {
    fn of(values: &[f64]) -> Self {
        Self {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            cv: coefficient_of_variation(values).unwrap_or(f64::NAN),
        }
    }
}

/// Statistics of the raw (pre-clamp) values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationSummary {
    pub qubits: usize,
    pub t1_us: Range,
    pub t2_us: Range,
    pub clamped: usize,
}

impl Calibration {
    pub fn summary(&self) -> CalibrationSummary {
        let t1: Vec<f64> = self.rows.iter().map(|r| r.t1_us).collect();
        let t2: Vec<f64> = self.rows.iter().map(|r| r.t2_us).collect();
        CalibrationSummary {
            qubits: self.rows.len(),
            t1_us: Range::of(&t1),
            t2_us: Range::of(&t2),
            clamped: self.rows.iter().filter(|r| r.t2_us > 2.0 * r.t1_us).count(),
        }
    }

    /// Writes the table back out with the original tokens.
    pub fn write_raw<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        let fail = |e: csv::Error| CliError::Runtime(e.to_string());
        w.write_record(HEADER).map_err(fail)?;
        for row in &self.rows {
            w.write_record(&row.raw).map_err(fail)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn ingest_calibration(path: &Path) -> Result<Calibration, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_calibration(file).map_err(|e| match e {
        CliError::Data(msg) => CliError::Data(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_calibration<R: Read>(input: R) -> Result<Calibration, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);
    let headers = reader.headers().map_err(|e| CliError::Data(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(CliError::Data(format!(
            "expected header `{}`, found `{}`",
            HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut rows = Vec::new();
    let mut specs = Vec::new();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Data(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let bad = |what: &str| CliError::Data(format!("line {line}: {what}"));
        let field = |i: usize| record.get(i).unwrap_or("");
        let qubit_id: u32 = field(0)
            .parse()
            .map_err(|_| bad(&format!("invalid qubit id `{}`", field(0))))?;
        let time = |i: usize, name: &str| -> Result<f64, CliError> {
            let v: f64 = field(i)
                .parse()
                .map_err(|_| bad(&format!("invalid {name} `{}`", field(i))))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(&format!("{name} must be positive, got {v}")));
            }
            Ok(v)
        };
        let (t1_us, t2_us) = (time(1, "t1_us")?, time(2, "t2_us")?);
        if !seen.insert(qubit_id) {
            return Err(bad(&format!("duplicate qubit id {qubit_id}")));
        }
        let t2 = if t2_us > 2.0 * t1_us {
            log::warn!(
                "line {line}: qubit {qubit_id} exceeds the Ramsey limit, T2 {t2_us} clamped to {}",
                2.0 * t1_us
            );
            2.0 * t1_us
        } else {
            t2_us
        };
        specs.push(QubitSpec {
            id: qubit_id,
            t1: t1_us,
            t2,
        });
        rows.push(CalibrationRow {
            line,
            raw: [field(0).to_string(), field(1).to_string(), field(2).to_string()],
            qubit_id,
            t1_us,
            t2_us,
        });
    }
    if rows.is_empty() {
        return Err(CliError::Data("no calibration rows".into()));
    }
    Ok(Calibration { rows, specs })
}
