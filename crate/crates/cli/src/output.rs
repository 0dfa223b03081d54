//! Plot-ready CSV and JSON emission.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sqstream::experiments::TrajectoryPoint;

use crate::error::{io_err, Result};
use crate::finance::CvarPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Seventeen significant digits: enough for any `f64` to round-trip.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

/// Writes `points` as `n,value,theory_value` (or the JSON equivalent) to
/// `dir/stem.ext` and returns the path.
pub fn write_trajectory(dir: &Path, stem: &str, points: &[TrajectoryPoint], format: Format) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    match format {
        Format::Json => write_json(&path, &points)?,
        Format::Csv => {
            let mut w = csv_writer(&path)?;
            w.write_record(["n", "value", "theory_value"])?;
            for p in points {
                w.write_record([p.n.to_string(), fmt_f64(p.value), fmt_opt(p.theory_value)])?;
            }
            w.flush().map_err(io_err(&path))?;
        }
    }
    Ok(path)
}

pub fn write_cvar_path(path: &Path, points: &[CvarPoint], format: Format) -> Result<()> {
    match format {
        Format::Json => write_json(path, &points),
        Format::Csv => {
            let mut w = csv_writer(path)?;
            w.write_record(["n", "theta", "sq", "ci_lo", "ci_hi"])?;
            for p in points {
                w.write_record([p.n.to_string(), fmt_f64(p.theta), fmt_f64(p.sq), fmt_opt(p.ci_lo), fmt_opt(p.ci_hi)])?;
            }
            w.flush().map_err(io_err(path))
        }
    }
}
