//! CSV persistence of [`RunRecord`]s.

use std::io::{Read, Write};
use std::path::Path;

use super::run::RunRecord;
use crate::error::{Error, Result};

pub const COLUMNS: [&str; 12] = [
    "method",
    "m",
    "p",
    "instance_seed",
    "nfev",
    "wall_time_ms",
    "p_best",
    "feasibility_ratio",
    "avg_performance",
    "n_qubits",
    "n_ancilla",
    "two_qubit_gates_per_layer",
];

/// Plain decimal with at least 17 significant digits, enough to round-trip
/// any f64 (one spare digit guards against `log10` rounding).
pub fn format_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (17 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_records<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record([
            r.method.to_string(),
            r.m.to_string(),
            r.p.to_string(),
            r.instance_seed.to_string(),
            r.nfev.to_string(),
            format_float(r.wall_time_ms),
            format_float(r.p_best),
            format_float(r.feasibility_ratio),
            r.avg_performance.map(format_float).unwrap_or_default(),
            r.n_qubits.to_string(),
            r.n_ancilla.to_string(),
            r.two_qubit_gates_per_layer.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    write_records(records, std::fs::File::create(path)?)
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, line: usize) -> Result<T> {
    let raw = row.get(i).unwrap_or("");
    raw.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {line}: bad {} '{raw}'", COLUMNS[i])))
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != COLUMNS {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let avg = match row.get(8).unwrap_or("").trim() {
            "" => None,
            _ => Some(field(&row, 8, line)?),
        };
        out.push(RunRecord {
            method: field(&row, 0, line)?,
            m: field(&row, 1, line)?,
            p: field(&row, 2, line)?,
            instance_seed: field(&row, 3, line)?,
            nfev: field(&row, 4, line)?,
            wall_time_ms: field(&row, 5, line)?,
            p_best: field(&row, 6, line)?,
            feasibility_ratio: field(&row, 7, line)?,
            avg_performance: avg,
            n_qubits: field(&row, 9, line)?,
            n_ancilla: field(&row, 10, line)?,
            two_qubit_gates_per_layer: field(&row, 11, line)?,
        });
    }
    Ok(out)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    read_records(std::fs::File::open(path)?)
}
