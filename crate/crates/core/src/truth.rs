//! Closed-form targets for Gaussian ARMA(1,1) processes.
//!
//! `Cov(X₁, X_k)` is written `γ_{k−1}`; the variance term `k = 1` is kept
//! outside the doubled sums.

use core::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::sim::ArmaSpec;

pub const DEFAULT_TOL: f64 = 1e-12;

/// Autocovariance `γ_k` at lag `k`.
pub fn arma_autocov(spec: &ArmaSpec, k: usize) -> f64 {
    let (phi, theta) = (spec.ar(), spec.ma());
    let s2 = spec.innovation_sd() * spec.innovation_sd();
    let denom = 1.0 - phi * phi;
    if k == 0 {
        return s2 * (1.0 + 2.0 * phi * theta + theta * theta) / denom;
    }
    let mut g = s2 * (1.0 + phi * theta) * (phi + theta) / denom;
    for _ in 1..k {
        g *= phi;
    }
    g
}

/// `Var(n^{−1/2} Σ Xᵢ) = γ₀ + (2/n) Σ_{k=2..n} γ_{k−1} (n + 1 − k)`.
pub fn finite_n_variance(spec: &ArmaSpec, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
        });
    }
    let mut gamma = arma_autocov(spec, 1);
    let mut cross = 0.0;
    for k in 2..=n {
        cross += gamma * (n + 1 - k) as f64;
        gamma *= spec.ar();
    }
    Ok(arma_autocov(spec, 0) + 2.0 * cross / n as f64)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
        });
    }
    Ok(())
}

/// Sums `term(γ_k)` over `k ≥ 1` until the geometric tail bound
/// `|γ_k| / (γ₀(1 − |φ|))` drops below `tol`.
fn sum_geometric_tail(spec: &ArmaSpec, tol: f64, term: impl Fn(f64) -> f64) -> f64 {
    let gamma0 = arma_autocov(spec, 0);
    let decay = 1.0 - spec.ar().abs();
    let mut gamma = arma_autocov(spec, 1);
    let mut total = 0.0;
    loop {
        total += term(gamma);
        if gamma.abs() / (gamma0 * decay) < tol {
            return total;
        }
        gamma *= spec.ar();
    }
}

/// Limit variance `σ² = γ₀ + 2 Σ_{k≥1} γ_k` by truncated summation.
pub fn sigma_sq_limit(spec: &ArmaSpec, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    Ok(arma_autocov(spec, 0) + 2.0 * sum_geometric_tail(spec, tol, |g| g))
}

/// `σ² = s²(1 + θ)² / (1 − φ)²`.
pub fn sigma_sq_closed_form(spec: &ArmaSpec) -> f64 {
    let s = spec.innovation_sd();
    let num = s * (1.0 + spec.ma());
    let den = 1.0 - spec.ar();
    num * num / (den * den)
}

/// `Cov(F(X), F(Y)) = arcsin(ρ/2) / 2π` for a standard bivariate normal
/// pair with correlation `ρ`.
pub fn spearman_cov(rho: f64) -> Result<f64> {
    if rho.is_nan() || rho.abs() > 1.0 {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
        });
    }
    Ok(libm::asin(rho / 2.0) / (2.0 * PI))
}

/// `σ_F² = 1/12 + 2 Σ_{k≥2} arcsin(ρ_k / 2) / 2π` with `ρ_k = γ_{k−1}/γ₀`.
pub fn sigma_f_sq(spec: &ArmaSpec, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let gamma0 = arma_autocov(spec, 0);
    let tail = sum_geometric_tail(spec, tol, |g| {
        libm::asin((g / gamma0).clamp(-1.0, 1.0) / 2.0) / (2.0 * PI)
    });
    Ok(1.0 / 12.0 + 2.0 * tail)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Marginal distribution function of the stationary process, `N(0, γ₀)`.
pub fn marginal_cdf(spec: &ArmaSpec) -> impl Fn(f64) -> f64 {
    let sd = libm::sqrt(arma_autocov(spec, 0));
    move |x| normal_cdf(x / sd)
}

/// Target values for one process and sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthSet {
    pub spec: ArmaSpec,
    pub n: usize,
    pub sigma_sq_finite_n: f64,
    pub sigma_sq: f64,
    pub sigma_f_sq: f64,
}

impl TruthSet {
    pub fn compute(spec: &ArmaSpec, n: usize) -> Result<Self> {
        Ok(Self {
            spec: *spec,
            n,
            sigma_sq_finite_n: finite_n_variance(spec, n)?,
            sigma_sq: sigma_sq_limit(spec, DEFAULT_TOL)?,
            sigma_f_sq: sigma_f_sq(spec, DEFAULT_TOL)?,
        })
    }

    pub fn gamma(&self, k: usize) -> f64 {
        arma_autocov(&self.spec, k)
    }
}
