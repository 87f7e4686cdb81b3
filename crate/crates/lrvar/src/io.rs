//! CSV files: single-column series and study result tables.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use lrvar_core::Series;

use crate::harness::MetricRecord;

pub const RESULT_COLUMNS: [&str; 10] = [
    "spec_id",
    "ar",
    "ma",
    "estimator",
    "parameter",
    "mean_adaptive_length",
    "truth",
    "bias",
    "variance",
    "mse",
];

/// Reads a series from CSV with a header row. Uses the column named `x`
/// when present, the first column otherwise.
pub fn read_series<R: Read>(reader: R) -> Result<Series> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().context("reading CSV header")?.clone();
    if headers.is_empty() {
        bail!("input has no header row");
    }
    let col = headers.iter().position(|h| h == "x").unwrap_or(0);
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("reading CSV row {}", i + 2))?;
        let field = rec
            .get(col)
            .ok_or_else(|| anyhow!("row {} has no column {}", i + 2, col + 1))?;
        let v: f64 = field
            .parse()
            .with_context(|| format!("row {}: {field:?} is not a number", i + 2))?;
        values.push(v);
    }
    if values.is_empty() {
        bail!("input contains no observations");
    }
    Ok(Series::new(values)?)
}

pub fn read_series_file(path: &Path) -> Result<Series> {
    let file = std::fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_series(file).with_context(|| format!("reading {}", path.display()))
}

/// Writes `values` as a CSV column headed `x`.
pub fn write_series<W: Write>(writer: W, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x"])?;
    for v in values {
        w.write_record([v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_results<W: Write>(writer: W, records: &[MetricRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RESULT_COLUMNS)?;
    for r in records {
        w.write_record([
            r.spec_id.to_string(),
            r.ar.to_string(),
            r.ma.to_string(),
            r.estimator.to_string(),
            r.parameter.to_string(),
            r.mean_adaptive_length
                .map(|v| v.to_string())
                .unwrap_or_default(),
            r.truth.to_string(),
            r.bias.to_string(),
            r.variance.to_string(),
            r.mse.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `x` rounded to `digits` significant digits, trailing zeros removed.
/// Plain notation for exponents in `-5..digits`, scientific otherwise.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
