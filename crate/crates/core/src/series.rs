use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};

/// A non-empty ordered sample `X₁..Xₙ` of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(values.to_vec())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn mean(&self) -> f64 {
        mean(&self.0)
    }

    /// Splits an even-length series into its first and second half.
    pub fn halves(&self) -> Result<(Series, Series)> {
        let n = self.0.len();
        if n % 2 != 0 {
            return Err(Error::OddLength(n));
        }
        let (a, b) = self.0.split_at(n / 2);
        Ok((Series(a.to_vec()), Series(b.to_vec())))
    }

    /// Applies `f` elementwise. The result must again be finite.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Series> {
        Series::new(self.0.iter().map(|&x| f(x)).collect())
    }
}

impl Deref for Series {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Series::new(values)
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
