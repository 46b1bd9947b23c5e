//! CSV and JSON result files.
//!
//! CSV columns, in order:
//! `z_mm, eps1_inv_mm, eps2_inv_mm, kappa_z, detuning_over_kappa, p_boson,
//! p_fermion, p_classical, p_entangled`. Floats carry 12 significant digits.
//! Lines starting with `#` before the header are comments. JSON is an array
//! of objects with the same field names and full `f64` precision.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::statistics::SurvivalRecord;

pub const CSV_COLUMNS: [&str; 9] = [
    "z_mm",
    "eps1_inv_mm",
    "eps2_inv_mm",
    "kappa_z",
    "detuning_over_kappa",
    "p_boson",
    "p_fermion",
    "p_classical",
    "p_entangled",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// A survival record together with the lattice point it was computed at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub z_mm: f64,
    pub eps1_inv_mm: f64,
    pub eps2_inv_mm: f64,
    pub kappa_z: f64,
    pub detuning_over_kappa: f64,
    pub p_boson: f64,
    pub p_fermion: f64,
    pub p_classical: f64,
    pub p_entangled: f64,
}

impl ResultRow {
    pub fn new(spec: &LatticeSpec, record: &SurvivalRecord) -> Self {
        ResultRow {
            z_mm: record.z,
            eps1_inv_mm: spec.eps1,
            eps2_inv_mm: spec.eps2,
            kappa_z: spec.kappa * record.z,
            detuning_over_kappa: (spec.eps2 - spec.eps1) / spec.kappa,
            p_boson: record.p_boson,
            p_fermion: record.p_fermion,
            p_classical: record.p_classical,
            p_entangled: record.p_entangled,
        }
    }

    fn values(&self) -> [f64; 9] {
        [
            self.z_mm,
            self.eps1_inv_mm,
            self.eps2_inv_mm,
            self.kappa_z,
            self.detuning_over_kappa,
            self.p_boson,
            self.p_fermion,
            self.p_classical,
            self.p_entangled,
        ]
    }
}

/// `x` with 12 significant digits: fixed notation for exponents in
/// `[-5, 12)`, scientific otherwise.
pub fn format_significant(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", (DIGITS - 1) as usize, 0.0);
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let exp: i32 = sci[sci.find('e').map_or(sci.len(), |i| i + 1)..]
        .parse()
        .unwrap_or(0);
    if (-5..DIGITS).contains(&exp) {
        format!("{:.*}", (DIGITS - 1 - exp) as usize, x)
    } else {
        sci
    }
}

pub fn write_csv<W: Write>(mut w: W, rows: &[ResultRow], comments: &[String]) -> std::io::Result<()> {
    for line in comments {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{}", CSV_COLUMNS.join(","))?;
    for row in rows {
        let fields: Vec<String> = row.values().iter().map(|&v| format_significant(v)).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    w.flush()
}

pub fn write_json<W: Write>(mut w: W, rows: &[ResultRow]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, rows)?;
    writeln!(w)?;
    w.flush()
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `rows` to `path`, replacing any existing file.
pub fn emit_results(rows: &[ResultRow], format: Format, path: &Path) -> Result<()> {
    emit_results_with_comments(rows, format, path, &[])
}

/// As [`emit_results`], with `#` comment lines ahead of the CSV header.
/// Comments are dropped for JSON.
pub fn emit_results_with_comments(
    rows: &[ResultRow],
    format: Format,
    path: &Path,
    comments: &[String],
) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let w = BufWriter::new(file);
    match format {
        Format::Csv => write_csv(w, rows, comments),
        Format::Json => write_json(w, rows),
    }
    .map_err(io_err(path))
}

pub fn read_json(path: &Path) -> Result<Vec<ResultRow>> {
    let file = File::open(path).map_err(io_err(path))?;
    serde_json::from_reader(std::io::BufReader::new(file)).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}
