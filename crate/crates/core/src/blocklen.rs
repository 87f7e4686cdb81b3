//! Carlstein's adaptive block length.
//!
//! An AR(1) model is fitted through the lag-1 sample autocorrelation and
//! the block length that is MSE-optimal for the Carlstein estimator under
//! that model is used:
//!
//! ```text
//! l = round( (2|ρ̂| / (1 − ρ̂²))^{2/3} · n^{1/3} ),   1 ≤ l ≤ max(1, ⌊n/2⌋)
//! ```

use crate::error::{Error, Result};
use crate::estimators::rank_transform;
use crate::series::Series;

/// Bound applied to the fitted autocorrelation.
pub const RHO_CLAMP: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ar1Fit {
    rho_hat: f64,
}

impl Ar1Fit {
    /// Clamps `rho` into `[−0.99, 0.99]`.
    pub fn new(rho: f64) -> Result<Self> {
        if rho.is_nan() {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: rho,
            });
        }
        Ok(Self {
            rho_hat: rho.clamp(-RHO_CLAMP, RHO_CLAMP),
        })
    }

    pub fn rho_hat(&self) -> f64 {
        self.rho_hat
    }
}

/// Yule–Walker lag-1 fit: `Σ(Xᵢ−X̄)(Xᵢ₊₁−X̄) / Σ(Xᵢ−X̄)²`.
pub fn fit_ar1(series: &Series) -> Result<Ar1Fit> {
    if series.len() < 2 {
        return Err(Error::Degenerate(
            "AR(1) fit needs at least two observations",
        ));
    }
    let m = series.mean();
    let denom: f64 = series.iter().map(|x| (x - m) * (x - m)).sum();
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::Degenerate("AR(1) fit on a constant series"));
    }
    let num: f64 = series.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    Ar1Fit::new(num / denom)
}

pub fn carlstein_block_length(fit: &Ar1Fit, n: usize) -> usize {
    let rho = fit.rho_hat;
    let ratio = 2.0 * rho.abs() / (1.0 - rho * rho);
    let raw = libm::pow(ratio, 2.0 / 3.0) * libm::cbrt(n as f64);
    let cap = (n / 2).max(1);
    (libm::round(raw) as usize).clamp(1, cap)
}

/// Fit and rule in one step.
pub fn adaptive_block_length(series: &Series) -> Result<usize> {
    Ok(carlstein_block_length(&fit_ar1(series)?, series.len()))
}

/// Smallest adaptive block length for the rank estimators. With `l = 1`
/// and no ties, `D̂ₙ` no longer depends on the data.
pub const MIN_RANK_BLOCK: usize = 2;

/// The rule applied to `F̂ₙ(Xⱼ)`, raised to [`MIN_RANK_BLOCK`] where the
/// series is long enough to hold two such blocks.
pub fn adaptive_rank_block_length(series: &Series) -> Result<usize> {
    let ranks = rank_transform(series);
    let l = carlstein_block_length(&fit_ar1(&ranks)?, series.len());
    Ok(l.max(MIN_RANK_BLOCK.min((series.len() / 2).max(1))))
}
