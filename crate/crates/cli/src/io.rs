//! CSV input/output for series data.
//!
//! Input format: UTF-8, one numeric value per line, optional header line
//! ("x" or any non-numeric token). Row order is time order.

use std::fs;
use std::path::Path;

use tvar_sieve::{Error, TimeSeries};

pub fn read_series_csv(path: &Path) -> Result<TimeSeries, Error> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
    let mut values = Vec::new();
    let mut first_content = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let header_candidate = first_content;
        first_content = false;
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::Data(format!(
                    "{}:{}: non-finite value {v}",
                    path.display(),
                    idx + 1
                )))
            }
            Err(_) => {
                // a non-numeric first content row is a header
                if header_candidate {
                    continue;
                }
                return Err(Error::Data(format!(
                    "{}:{}: cannot parse {line:?} as a number",
                    path.display(),
                    idx + 1
                )));
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Data(format!("{}: no data rows", path.display())));
    }
    Ok(TimeSeries::new(values)?.with_source(path.display().to_string()))
}

pub fn write_series_csv(series: &TimeSeries) -> String {
    let mut out = String::from("x\n");
    for v in series.values() {
        out.push_str(&format!("{v:.16e}\n"));
    }
    out
}
