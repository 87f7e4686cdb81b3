//! Block and kernel estimators of the long-run scale.
//!
//! With block length `l`, `k = ⌊n/l⌋` full blocks and sample mean `X̄`, the
//! non-overlapping estimators are built from
//!
//! ```text
//! dᵢ = |Sᵢ(l) − l·X̄| / √l,   Sᵢ(l) = X_{(i−1)l+1} + … + X_{il}
//! ```
//!
//! [`bhat_n`] estimates σ by `√(π/2)·mean(dᵢ)`, [`carlstein`] estimates σ²
//! by `mean(dᵢ²)`. Observations past `k·l` only enter the mean.
//! [`overlapping_block`] uses all `n−l+1` sliding windows and the `p`-th
//! power, normalized by `c_p = 1/E|Z|^p`.
//!
//! [`dhat_n`] and [`d_n`] are the same computation as [`bhat_n`] applied to
//! `F̂ₙ(Xⱼ)` or `F(Xⱼ)` and estimate σ_F.
//!
//! All estimators subtract the centre from each observation before block
//! sums are formed, so adding a constant to the data only perturbs the
//! result by rounding.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::{mean, Series};

/// `√(π/2)`, i.e. `1/E|Z|` for standard normal `Z`.
pub const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_3;

fn check_block(n: usize, l: usize) -> Result<()> {
    if l == 0 || l > n {
        return Err(Error::BlockLength { l, n });
    }
    Ok(())
}

#[inline]
fn abs_pow(d: f64, p: f64) -> f64 {
    if p == 1.0 {
        d
    } else if p == 2.0 {
        d * d
    } else {
        libm::pow(d, p)
    }
}

/// `|Sᵢ(l) − l·centre| / √l` over the `⌊n/l⌋` full non-overlapping blocks.
fn block_deviations(values: &[f64], l: usize, center: f64) -> impl Iterator<Item = f64> + '_ {
    let scale = libm::sqrt(l as f64);
    // a block spanning the whole sample sums to exactly zero around its mean
    let whole = l == values.len();
    values.chunks_exact(l).map(move |block| {
        if whole {
            0.0
        } else {
            block.iter().map(|x| x - center).sum::<f64>().abs() / scale
        }
    })
}

fn bhat_slice(values: &[f64], l: usize, center: f64) -> f64 {
    let k = (values.len() / l) as f64;
    SQRT_HALF_PI * block_deviations(values, l, center).sum::<f64>() / k
}

/// Non-overlapping block estimator of σ.
pub fn bhat_n(series: &Series, l: usize) -> Result<f64> {
    check_block(series.len(), l)?;
    Ok(bhat_slice(series, l, series.mean()))
}

/// Carlstein's non-overlapping block estimator of σ².
pub fn carlstein(series: &Series, l: usize) -> Result<f64> {
    check_block(series.len(), l)?;
    let k = (series.len() / l) as f64;
    let sum: f64 = block_deviations(series, l, series.mean())
        .map(|d| d * d)
        .sum();
    Ok(sum / k)
}

/// Overlapping-block estimator of σ^p.
pub fn overlapping_block(series: &Series, l: usize, p: f64) -> Result<f64> {
    let n = series.len();
    check_block(n, l)?;
    let c_p = normal_abs_moment_inverse(p)?;
    if l == n {
        return Ok(0.0);
    }
    let center = series.mean();
    let y: Vec<f64> = series.iter().map(|x| x - center).collect();
    let scale = libm::sqrt(l as f64);
    let windows = n - l + 1;

    let mut window_sum = 0.0;
    let mut acc = 0.0;
    for i in 0..windows {
        // refresh every l steps so the running sum does not drift
        if i % l == 0 {
            window_sum = y[i..i + l].iter().sum();
        } else {
            window_sum += y[i + l - 1] - y[i - 1];
        }
        acc += abs_pow(window_sum.abs() / scale, p);
    }
    Ok(c_p * acc / windows as f64)
}

/// `c_p = 1/E|Z|^p = √π / (2^{p/2} Γ((p+1)/2))`, evaluated on the log scale.
pub fn normal_abs_moment_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
        });
    }
    Ok(if p == 1.0 {
        SQRT_HALF_PI
    } else if p == 2.0 {
        1.0
    } else {
        abs_moment_inverse_log_gamma(p)
    })
}

fn abs_moment_inverse_log_gamma(p: f64) -> f64 {
    let ln_pi = libm::log(core::f64::consts::PI);
    libm::exp(0.5 * ln_pi - 0.5 * p * core::f64::consts::LN_2 - libm::lgamma(0.5 * (p + 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `k(x) = max(0, 1 − |x|)`
    Bartlett,
}

impl Kernel {
    pub fn weight(self, x: f64) -> f64 {
        match self {
            Kernel::Bartlett => (1.0 - x.abs()).max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    kind: Kernel,
    bandwidth: f64,
}

impl KernelSpec {
    pub fn bartlett(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "bandwidth",
                value: bandwidth,
            });
        }
        Ok(Self {
            kind: Kernel::Bartlett,
            bandwidth,
        })
    }

    pub fn kind(&self) -> Kernel {
        self.kind
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

/// Kernel (HAC) estimator of σ²:
/// `(1/n) Σᵢ Σⱼ k((i−j)/γ)(Xᵢ − X̄)(Xⱼ − X̄)`.
///
/// Only lags `h < γ` carry weight, so the cost is `O(n·γ)`.
pub fn jde_kernel_estimator(series: &Series, kernel: &KernelSpec) -> f64 {
    let n = series.len();
    let center = series.mean();
    let y: Vec<f64> = series.iter().map(|x| x - center).collect();
    let gamma = kernel.bandwidth;

    let mut total: f64 = y.iter().map(|v| v * v).sum();
    let mut h = 1;
    while h < n && (h as f64) < gamma {
        let w = kernel.kind.weight(h as f64 / gamma);
        let cross: f64 = y[..n - h].iter().zip(&y[h..]).map(|(a, b)| a * b).sum();
        total += 2.0 * w * cross;
        h += 1;
    }
    (total / n as f64).max(0.0)
}

/// Sorted copy of a sample; evaluates `F̂ₙ(x) = #{i : Xᵢ ≤ x} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EcdfTable {
    sorted: Vec<f64>,
}

impl EcdfTable {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Self { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// `sup_t |F̂ₙ(t) − F(t)|` for a continuous distribution function `F`.
    pub fn sup_distance(&self, cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.sorted.len();
        let nf = n as f64;
        let mut sup: f64 = 0.0;
        let mut lo = 0;
        while lo < n {
            let v = self.sorted[lo];
            let mut hi = lo + 1;
            while hi < n && self.sorted[hi] == v {
                hi += 1;
            }
            let f = cdf(v);
            sup = sup
                .max((hi as f64 / nf - f).abs())
                .max((f - lo as f64 / nf).abs());
            lo = hi;
        }
        sup
    }
}

pub fn ecdf(series: &Series) -> EcdfTable {
    EcdfTable::from_values(series).expect("series is non-empty")
}

/// The values `F̂ₙ(X₁), …, F̂ₙ(Xₙ)` in their original order.
pub fn rank_transform(series: &Series) -> Series {
    let table = ecdf(series);
    series
        .map(|x| table.eval(x))
        .expect("ecdf values lie in (0, 1]")
}

/// Rank-based estimator of σ_F using the empirical distribution function.
pub fn dhat_n(series: &Series, l: usize) -> Result<f64> {
    check_block(series.len(), l)?;
    let u = rank_transform(series);
    Ok(bhat_slice(&u, l, mean(&u)))
}

/// Estimator of σ_F using a known distribution function `cdf`.
pub fn d_n(series: &Series, l: usize, cdf: impl Fn(f64) -> f64) -> Result<f64> {
    check_block(series.len(), l)?;
    let mut u = Vec::with_capacity(series.len());
    for &x in series.iter() {
        let v = cdf(x);
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::CdfOutOfRange(v));
        }
        u.push(v);
    }
    Ok(bhat_slice(&u, l, mean(&u)))
}
