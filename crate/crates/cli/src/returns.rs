//! Price files to log-return series.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, CliError, Result};

/// Header names recognised as the date column, compared case-insensitively.
const DATE_HEADERS: [&str; 4] = ["date", "timestamp", "time", "day"];

const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Timestamp {
    /// 1-based data row of the later price.
    Row { row: usize },
    Date { date: NaiveDate },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    #[default]
    EveryRow,
    /// Every fifth row, the usual trading week.
    Weekly,
    /// First row, then each row dated at least seven days after the last
    /// kept one.
    WeeklyByDate,
}

/// Log-returns of a price series. `timestamps[k]` labels the price the
/// k-th return ends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub timestamps: Vec<Timestamp>,
    pub log_returns: Vec<f64>,
}

impl ReturnSeries {
    /// Builds the series from validated prices and their labels.
    pub fn from_prices(timestamps: &[Timestamp], prices: &[f64]) -> Result<Self> {
        if prices.len() < 2 {
            return Err(CliError::TooFewPrices(prices.len()));
        }
        if timestamps.len() != prices.len() {
            return Err(CliError::Invalid(format!(
                "{} timestamps for {} prices",
                timestamps.len(),
                prices.len()
            )));
        }
        for (i, &p) in prices.iter().enumerate() {
            if !(p.is_finite() && p > 0.0) {
                return Err(CliError::Row { row: i + 1, reason: "non-positive price".into() });
            }
        }
        Ok(Self {
            timestamps: timestamps[1..].to_vec(),
            log_returns: prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.log_returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_returns.is_empty()
    }

    /// Losses `-r_k`, the stream fed to the estimator.
    pub fn losses(&self) -> impl Iterator<Item = f64> + '_ {
        self.log_returns.iter().map(|r| -r)
    }
}

/// Reads `price_column` from a headed CSV file and turns it into log-returns
/// after applying `sampling`.
///
/// Every row is validated before sampling, so an error names the offending
/// data row (1-based, header excluded) even if that row would be skipped.
pub fn ingest_csv(path: &Path, price_column: &str, sampling: Sampling) -> Result<ReturnSeries> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    ingest_reader(file, price_column, sampling)
}

pub fn ingest_reader<R: std::io::Read>(reader: R, price_column: &str, sampling: Sampling) -> Result<ReturnSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let price_idx = headers.iter().position(|h| h == price_column).ok_or_else(|| CliError::MissingColumn {
        column: price_column.to_string(),
        available: headers.iter().map(str::to_string).collect(),
    })?;
    let date_idx = headers
        .iter()
        .position(|h| DATE_HEADERS.iter().any(|d| h.eq_ignore_ascii_case(d)))
        .filter(|&i| i != price_idx);

    let mut prices = Vec::new();
    let mut raw_dates = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| CliError::Row { row, reason: e.to_string() })?;
        let field = record.get(price_idx).ok_or_else(|| CliError::Row { row, reason: "missing price field".into() })?;
        let price: f64 = field
            .parse()
            .map_err(|_| CliError::Row { row, reason: format!("unparsable price {field:?}") })?;
        if !(price.is_finite() && price > 0.0) {
            return Err(CliError::Row { row, reason: "non-positive price".into() });
        }
        prices.push(price);
        if let Some(d) = date_idx {
            raw_dates.push(record.get(d).unwrap_or("").to_string());
        }
    }

    let timestamps = timestamps(&raw_dates, prices.len())?;
    let keep = sample_rows(&timestamps, sampling)?;
    let kept_prices: Vec<f64> = keep.iter().map(|&i| prices[i]).collect();
    let kept_stamps: Vec<Timestamp> = keep.iter().map(|&i| timestamps[i]).collect();
    ReturnSeries::from_prices(&kept_stamps, &kept_prices)
}

/// Dates when every value parses, row numbers otherwise.
fn timestamps(raw: &[String], n: usize) -> Result<Vec<Timestamp>> {
    let parsed: Option<Vec<NaiveDate>> = if raw.is_empty() {
        None
    } else {
        raw.iter().map(|s| NaiveDate::parse_from_str(s, DATE_FORMAT).ok()).collect()
    };
    match parsed {
        Some(dates) => {
            for (i, w) in dates.windows(2).enumerate() {
                if w[1] <= w[0] {
                    return Err(CliError::Row { row: i + 2, reason: format!("date {} does not increase", w[1]) });
                }
            }
            Ok(dates.into_iter().map(|date| Timestamp::Date { date }).collect())
        }
        None => Ok((1..=n).map(|row| Timestamp::Row { row }).collect()),
    }
}

fn sample_rows(stamps: &[Timestamp], sampling: Sampling) -> Result<Vec<usize>> {
    Ok(match sampling {
        Sampling::EveryRow => (0..stamps.len()).collect(),
        Sampling::Weekly => (0..stamps.len()).step_by(5).collect(),
        Sampling::WeeklyByDate => {
            let mut keep = Vec::new();
            let mut last: Option<NaiveDate> = None;
            for (i, s) in stamps.iter().enumerate() {
                let Timestamp::Date { date } = *s else {
                    return Err(CliError::NotDated);
                };
                if last.is_none_or(|l| (date - l).num_days() >= 7) {
                    keep.push(i);
                    last = Some(date);
                }
            }
            keep
        }
    })
}
