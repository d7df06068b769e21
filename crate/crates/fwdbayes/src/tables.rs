//! CSV tables: datasets, replication rows, trend rows and plot series.

use std::path::Path;

use fwdbayes_core::modes::TrendRow;
use fwdbayes_core::regression::{Dataset, RunReport};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
struct Point {
    x: f64,
    y: f64,
}

pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e, "dataset"))?;
    let mut points = Vec::new();
    for row in reader.deserialize::<Point>() {
        let p = row.map_err(|e| csv_error(path, e, "dataset"))?;
        if !(0.0..=1.0).contains(&p.x) || !p.y.is_finite() {
            return Err(CliError::config("dataset", format!("point ({}, {}) outside [0,1] x R", p.x, p.y)));
        }
        points.push((p.x, p.y));
    }
    Ok(Dataset::new(points))
}

pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    write_rows(path, data.points.iter().map(|&(x, y)| Point { x, y }))
}

#[derive(Debug, Serialize)]
struct ReplicationRow {
    seed: u64,
    n: usize,
    argmax_model: u32,
    argmax_posterior: f64,
    concentration: f64,
    mean_l2_error: f64,
}

pub fn write_replications(path: &Path, report: &RunReport) -> Result<()> {
    write_rows(
        path,
        report.replications.iter().map(|r| ReplicationRow {
            seed: r.seed,
            n: r.n,
            argmax_model: r.argmax_model,
            argmax_posterior: r.argmax_posterior,
            concentration: r.concentration,
            mean_l2_error: r.mean_l2_error,
        }),
    )
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct TrendRecord {
    pub n: usize,
    pub estimate: f64,
    pub stderr: f64,
}

impl From<&TrendRow> for TrendRecord {
    fn from(r: &TrendRow) -> Self {
        TrendRecord { n: r.n, estimate: r.estimate, stderr: r.stderr }
    }
}

pub fn write_trend(path: &Path, rows: &[TrendRow]) -> Result<()> {
    write_rows(path, rows.iter().map(TrendRecord::from))
}

/// Writes serializable rows with a header line.
pub fn write_rows<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e, "out"))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e, "out"))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error, field: &str) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            _ => unreachable!("checked is_io_error"),
        }
    } else {
        CliError::config(field, format!("{}: {e}", path.display()))
    }
}
