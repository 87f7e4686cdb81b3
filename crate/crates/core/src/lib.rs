//! Long-run variance estimation for stationary dependent processes.
//!
//! The target is the variance of the limiting normal law of normalized
//! partial sums,
//!
//! ```text
//! σ² = Var(X₁) + 2 Σ_{k≥2} Cov(X₁, X_k)
//! ```
//!
//! and its rank analogue σ_F², the same series evaluated on `F(X_k)` where
//! `F` is the marginal distribution function. The crate provides
//!
//! - block estimators (non-overlapping, Carlstein, overlapping `p`-th power),
//!   a Bartlett-kernel HAC estimator, and the empirical-CDF based rank
//!   estimators ([`estimators`]);
//! - Carlstein's adaptive block length via an AR(1) fit ([`blocklen`]);
//! - seedable Gaussian ARMA(1,1) simulation ([`sim`]) and the matching
//!   closed-form ground truths ([`truth`]);
//! - the studentized two-sample Hodges–Lehmann statistic ([`changepoint`]);
//! - estimator dispatch and metric aggregation for Monte Carlo studies
//!   ([`study`]).
//!
//! The crate is `no_std` and only needs `alloc`. Everything is a pure
//! function of its inputs, so all of it can be driven from many threads.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod blocklen;
pub mod changepoint;
pub mod error;
pub mod estimators;
pub mod series;
pub mod sim;
pub mod study;
pub mod truth;

pub use blocklen::{carlstein_block_length, fit_ar1, Ar1Fit};
pub use changepoint::{hodges_lehmann, studentized_hl, TwoSample};
pub use error::{Error, Result};
pub use estimators::{
    bhat_n, carlstein, d_n, dhat_n, ecdf, jde_kernel_estimator, normal_abs_moment_inverse,
    overlapping_block, EcdfTable, KernelSpec,
};
pub use series::Series;
pub use sim::{gaussian_stream, mix_seed, simulate_arma, ArmaSpec, SimConfig};
pub use truth::TruthSet;
