//! Time series container.

use crate::error::{Error, Result};

/// An ordered sequence of real-valued observations x_1..x_n, with optional
/// provenance metadata. Values are validated to be finite on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    source: Option<String>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Data(format!(
                "non-finite value {} at observation {}",
                values[pos],
                pos + 1
            )));
        }
        Ok(Self { values, source: None })
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn source(&self) -> Option<&str> {
        self.source.as_deref()
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Centered copy together with the subtracted mean.
    pub fn demeaned(&self) -> (TimeSeries, f64) {
        let m = self.mean();
        let centered = TimeSeries {
            values: self.values.iter().map(|v| v - m).collect(),
            source: self.source.clone(),
        };
        (centered, m)
    }

    /// The first `len` observations as a new series (used by the
    /// train/validation split).
    pub fn prefix(&self, len: usize) -> TimeSeries {
        TimeSeries {
            values: self.values[..len.min(self.values.len())].to_vec(),
            source: self.source.clone(),
        }
    }
}

impl std::ops::Index<usize> for TimeSeries {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.values[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(TimeSeries::new(vec![1.0, f64::NAN]).is_err());
        assert!(TimeSeries::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(TimeSeries::new(vec![1.0, -2.0]).is_ok());
    }

    #[test]
    fn demean_centers() {
        let x = TimeSeries::new(vec![1.0, 2.0, 3.0]).unwrap();
        let (c, m) = x.demeaned();
        assert_eq!(m, 2.0);
        assert_eq!(c.values(), &[-1.0, 0.0, 1.0]);
    }
}
