//! Seedable Gaussian ARMA(1,1) sample paths.
//!
//! Standard normal variates come from the ziggurat sampler of `rand_distr`
//! driven by a ChaCha8 stream keyed with `seed_from_u64(seed)`. Both are
//! portable and use `libm`, so a seed gives the same bits on every platform
//! and under any thread count. Paths start from `X₀ = ε₀ = 0` and the first
//! `burn_in` values are discarded.

use alloc::vec::Vec;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::series::Series;

pub const DEFAULT_BURN_IN: usize = 1000;

/// The eleven (AR, MA) settings of the reference simulation design.
pub const TABLE_1: [(f64, f64); 11] = [
    (0.5, 0.0),
    (0.1, 0.0),
    (-0.1, 0.0),
    (-0.8, 0.0),
    (0.0, 0.8),
    (0.0, 0.1),
    (0.0, -0.8),
    (0.0, -0.1),
    (0.5, 0.5),
    (-0.5, -0.5),
    (0.0, 0.0),
];

/// `X_t = ar·X_{t−1} + ε_t + ma·ε_{t−1}` with `ε_t ~ N(0, innovation_sd²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmaSpec {
    ar: f64,
    ma: f64,
    innovation_sd: f64,
}

impl ArmaSpec {
    pub fn new(ar: f64, ma: f64, innovation_sd: f64) -> Result<Self> {
        if ar.is_nan() || ar.abs() >= 1.0 {
            return Err(Error::NonStationary(ar));
        }
        if !ma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "ma",
                value: ma,
            });
        }
        if !(innovation_sd > 0.0 && innovation_sd.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "innovation_sd",
                value: innovation_sd,
            });
        }
        Ok(Self {
            ar,
            ma,
            innovation_sd,
        })
    }

    /// Unit innovation variance.
    pub fn arma(ar: f64, ma: f64) -> Result<Self> {
        Self::new(ar, ma, 1.0)
    }

    pub fn white_noise() -> Self {
        Self {
            ar: 0.0,
            ma: 0.0,
            innovation_sd: 1.0,
        }
    }

    pub fn table_1() -> Vec<ArmaSpec> {
        TABLE_1
            .iter()
            .map(|&(ar, ma)| Self::arma(ar, ma).expect("table entries are stationary"))
            .collect()
    }

    pub fn ar(&self) -> f64 {
        self.ar
    }

    pub fn ma(&self) -> f64 {
        self.ma
    }

    pub fn innovation_sd(&self) -> f64 {
        self.innovation_sd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    n: usize,
    burn_in: usize,
    seed: u64,
}

impl SimConfig {
    pub fn new(n: usize, burn_in: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                value: 0.0,
            });
        }
        Ok(Self { n, burn_in, seed })
    }

    /// `n` values after the default burn-in of 1000.
    pub fn with_seed(n: usize, seed: u64) -> Result<Self> {
        Self::new(n, DEFAULT_BURN_IN, seed)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Infinite iterator of standard normal draws.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    #[inline]
    fn next(&mut self) -> Option<f64> {
        Some(StandardNormal.sample(&mut self.rng))
    }
}

pub fn gaussian_stream(seed: u64, count: usize) -> Vec<f64> {
    NormalStream::new(seed).take(count).collect()
}

pub fn simulate_arma(spec: &ArmaSpec, cfg: &SimConfig) -> Series {
    let mut innovations = NormalStream::new(cfg.seed).map(|z| z * spec.innovation_sd);
    let mut values = Vec::with_capacity(cfg.n);
    let (mut x_prev, mut e_prev) = (0.0_f64, 0.0_f64);
    for t in 0..cfg.burn_in + cfg.n {
        let e = innovations.next().unwrap_or(0.0);
        let x = spec.ar * x_prev + e + spec.ma * e_prev;
        if t >= cfg.burn_in {
            values.push(x);
        }
        x_prev = x;
        e_prev = e;
    }
    Series::new(values).expect("stationary recursion on finite draws stays finite")
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

// SplitMix64 finalizer.
#[inline]
fn fmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for replication `rep` of experiment cell `cell`.
///
/// `h₀ = f(master + γ)`, `h₁ = f(h₀ ⊕ f(cell + 2γ))`, `h₂ = f(h₁ ⊕ f(rep + 3γ))`
/// where `f` is the SplitMix64 finalizer and `γ` the golden-ratio increment
/// (all arithmetic wrapping). Each replication's stream depends only on
/// its own coordinates, never on execution order.
pub fn mix_seed(master: u64, cell: u64, rep: u64) -> u64 {
    let h = fmix64(master.wrapping_add(GOLDEN_GAMMA));
    let h = fmix64(h ^ fmix64(cell.wrapping_add(GOLDEN_GAMMA.wrapping_mul(2))));
    fmix64(h ^ fmix64(rep.wrapping_add(GOLDEN_GAMMA.wrapping_mul(3))))
}
