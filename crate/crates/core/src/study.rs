//! Estimator dispatch and metric aggregation for Monte Carlo studies.

use core::fmt;
use core::str::FromStr;

use crate::blocklen::{adaptive_block_length, adaptive_rank_block_length};
use crate::error::{Error, Result};
use crate::estimators::{
    bhat_n, carlstein, dhat_n, jde_kernel_estimator, overlapping_block, rank_transform, KernelSpec,
};
use crate::series::Series;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EstimatorId {
    /// non-overlapping `√(π/2)·mean|·|` estimator of σ
    Bhat,
    /// non-overlapping mean-square estimator of σ²
    Carlstein,
    /// overlapping blocks, `p = 2`, estimator of σ²
    Overlapping,
    /// Bartlett-kernel HAC estimator of σ²
    Jde,
    /// rank version of `Bhat`, estimator of σ_F
    Dhat,
    /// overlapping blocks, `p = 2`, on `F̂ₙ(Xⱼ)`, estimator of σ_F²
    Pse,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 6] = [
        EstimatorId::Bhat,
        EstimatorId::Carlstein,
        EstimatorId::Overlapping,
        EstimatorId::Jde,
        EstimatorId::Dhat,
        EstimatorId::Pse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorId::Bhat => "bhat_n",
            EstimatorId::Carlstein => "carlstein",
            EstimatorId::Overlapping => "overlapping",
            EstimatorId::Jde => "jde",
            EstimatorId::Dhat => "dhat_n",
            EstimatorId::Pse => "pse",
        }
    }

    /// True for estimators of a standard deviation rather than a variance.
    pub fn estimates_scale(self) -> bool {
        matches!(self, EstimatorId::Bhat | EstimatorId::Dhat)
    }

    pub fn is_rank_based(self) -> bool {
        matches!(self, EstimatorId::Dhat | EstimatorId::Pse)
    }

    pub fn uses_bandwidth(self) -> bool {
        matches!(self, EstimatorId::Jde)
    }

    /// Interprets a numeric smoothing parameter: a bandwidth for the kernel
    /// estimator, a block length otherwise.
    pub fn smoothing_from_value(self, value: f64) -> Result<Smoothing> {
        if self.uses_bandwidth() {
            KernelSpec::bartlett(value)?;
            return Ok(Smoothing::Bandwidth(value));
        }
        if !(value >= 1.0 && libm::trunc(value) == value && value <= usize::MAX as f64) {
            return Err(Error::InvalidParameter {
                name: "block length",
                value,
            });
        }
        Ok(Smoothing::BlockLength(value as usize))
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown estimator {0:?}")]
pub struct UnknownEstimator(pub alloc::string::String);

impl FromStr for EstimatorId {
    type Err = UnknownEstimator;

    fn from_str(s: &str) -> core::result::Result<Self, UnknownEstimator> {
        EstimatorId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| UnknownEstimator(s.into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    BlockLength(usize),
    Bandwidth(f64),
    /// Carlstein's rule on the data (on `F̂ₙ(Xⱼ)` for rank estimators).
    Adaptive,
}

impl Smoothing {
    pub fn is_adaptive(&self) -> bool {
        matches!(self, Smoothing::Adaptive)
    }

    /// Sort key: numeric parameters ascending, adaptive last.
    pub fn order_key(&self) -> f64 {
        match *self {
            Smoothing::BlockLength(l) => l as f64,
            Smoothing::Bandwidth(g) => g,
            Smoothing::Adaptive => f64::INFINITY,
        }
    }
}

impl fmt::Display for Smoothing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Smoothing::BlockLength(l) => write!(f, "{l}"),
            Smoothing::Bandwidth(g) => write!(f, "{g}"),
            Smoothing::Adaptive => f.write_str("adaptive"),
        }
    }
}

/// One estimate and the block length it used (if any).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    /// Mean over halves when split-half evaluation is used.
    pub block_length: Option<f64>,
}

fn resolve_block(series: &Series, estimator: EstimatorId, smoothing: Smoothing) -> Result<usize> {
    match smoothing {
        Smoothing::BlockLength(l) => Ok(l),
        Smoothing::Adaptive if estimator.is_rank_based() => adaptive_rank_block_length(series),
        Smoothing::Adaptive => adaptive_block_length(series),
        Smoothing::Bandwidth(_) => Err(Error::UnsupportedParameter {
            estimator: estimator.name(),
            parameter: "bandwidth",
        }),
    }
}

pub fn evaluate(series: &Series, estimator: EstimatorId, smoothing: Smoothing) -> Result<Estimate> {
    if estimator == EstimatorId::Jde {
        let Smoothing::Bandwidth(gamma) = smoothing else {
            return Err(Error::UnsupportedParameter {
                estimator: estimator.name(),
                parameter: if smoothing.is_adaptive() {
                    "adaptive"
                } else {
                    "block length"
                },
            });
        };
        let value = jde_kernel_estimator(series, &KernelSpec::bartlett(gamma)?);
        return Ok(Estimate {
            value,
            block_length: None,
        });
    }
    let l = resolve_block(series, estimator, smoothing)?;
    let value = match estimator {
        EstimatorId::Bhat => bhat_n(series, l)?,
        EstimatorId::Carlstein => carlstein(series, l)?,
        EstimatorId::Overlapping => overlapping_block(series, l, 2.0)?,
        EstimatorId::Dhat => dhat_n(series, l)?,
        EstimatorId::Pse => overlapping_block(&rank_transform(series), l, 2.0)?,
        EstimatorId::Jde => unreachable!(),
    };
    Ok(Estimate {
        value,
        block_length: Some(l as f64),
    })
}

/// Mean of the estimator over the first and second half of `series`.
/// Each half is treated as a sample of its own, including its empirical
/// distribution function and adaptive block length.
pub fn split_half_estimate(
    series: &Series,
    estimator: EstimatorId,
    smoothing: Smoothing,
) -> Result<Estimate> {
    evaluate_cell(
        series,
        &CellSpec::new(estimator, smoothing).split_half(true),
    )
}

/// How one study cell turns a series into the number that is compared
/// with the truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    pub estimator: EstimatorId,
    pub smoothing: Smoothing,
    pub split_half: bool,
    /// Square the estimate (done per half, before averaging).
    pub square: bool,
}

impl CellSpec {
    pub fn new(estimator: EstimatorId, smoothing: Smoothing) -> Self {
        Self {
            estimator,
            smoothing,
            split_half: false,
            square: false,
        }
    }

    pub fn split_half(mut self, on: bool) -> Self {
        self.split_half = on;
        self
    }

    pub fn square(mut self, on: bool) -> Self {
        self.square = on;
        self
    }
}

pub fn evaluate_cell(series: &Series, cell: &CellSpec) -> Result<Estimate> {
    let one = |s: &Series| -> Result<Estimate> {
        let mut e = evaluate(s, cell.estimator, cell.smoothing)?;
        if cell.square {
            e.value *= e.value;
        }
        Ok(e)
    };
    if !cell.split_half {
        return one(series);
    }
    let (a, b) = series.halves()?;
    let (ea, eb) = (one(&a)?, one(&b)?);
    Ok(Estimate {
        value: 0.5 * (ea.value + eb.value),
        block_length: ea
            .block_length
            .zip(eb.block_length)
            .map(|(x, y)| 0.5 * (x + y)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub bias: f64,
    /// Population form (denominator `R`).
    pub variance: f64,
    pub mse: f64,
    /// Standard error of the mean estimate, `√(variance / R)`.
    pub std_error: f64,
}

pub fn aggregate_metrics(estimates: &[f64], truth: f64) -> Result<Metrics> {
    if estimates.is_empty() {
        return Err(Error::Degenerate("no estimates to aggregate"));
    }
    let r = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / r;
    let variance = estimates
        .iter()
        .map(|e| (e - mean) * (e - mean))
        .sum::<f64>()
        / r;
    let mse = estimates
        .iter()
        .map(|e| (e - truth) * (e - truth))
        .sum::<f64>()
        / r;
    Ok(Metrics {
        bias: mean - truth,
        variance,
        mse,
        std_error: libm::sqrt(variance / r),
    })
}
