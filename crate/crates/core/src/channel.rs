//! The binary two-way relay channel seen from the relay.
//!
//! Terminals A and B send BPSK symbols `mu(x) = 1 - 2x` simultaneously and the
//! relay observes `Y = mu(X_A) + mu(X_B) + W` with `W ~ N(0, sigma^2)`. Under the
//! IID input assumption the relay sees a memoryless virtual channel from
//! `Z = X_A xor X_B` to `Y`:
//!
//! ```text
//! L[y|1] = F(y; 0, sigma^2)
//! L[y|0] = 1/2 F(y; -2, sigma^2) + 1/2 F(y; +2, sigma^2)
//! ```
//!
//! The channel is not output-symmetric, which is why density evolution has to
//! track both conditional message densities.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;

/// A binary symbol, always 0 or 1.
pub type Bit = u8;

/// Binary-to-bipolar map used by both terminals.
#[inline]
pub fn bipolar(x: Bit) -> f64 {
    1.0 - 2.0 * x as f64
}

/// Anything density evolution and the BP oracle can push messages through:
/// a binary-input channel that can be sampled and that yields a log-likelihood
/// ratio `ln(p(y|0) / p(y|1))` for each output.
pub trait VirtualChannel: Sync {
    fn sample_output<R: Rng + ?Sized>(&self, z: Bit, rng: &mut R) -> f64;
    fn llr(&self, y: f64) -> f64;
}

/// Noise level of the two-way relay channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    sigma: f64,
}

impl ChannelParams {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidChannel(format!(
                "sigma must be positive and finite, got {sigma}"
            )));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Draws `y ~ L[.|z]`.
    pub fn sample_output<R: Rng + ?Sized>(&self, z: Bit, rng: &mut R) -> f64 {
        let w: f64 = rng.sample(StandardNormal);
        let mean = if z == 1 {
            0.0
        } else if rng.random::<bool>() {
            2.0
        } else {
            -2.0
        };
        mean + self.sigma * w
    }

    /// The density `L[y|z]`.
    pub fn likelihood(&self, y: f64, z: Bit) -> f64 {
        let s = self.sigma;
        if z == 1 {
            gaussian_pdf(y, 0.0, s)
        } else {
            0.5 * gaussian_pdf(y, -2.0, s) + 0.5 * gaussian_pdf(y, 2.0, s)
        }
    }

    /// `ln L[y|z]`, evaluated without underflow.
    pub fn ln_likelihood(&self, y: f64, z: Bit) -> f64 {
        let s2 = self.sigma * self.sigma;
        let ln_norm = -0.5 * (2.0 * PI * s2).ln();
        if z == 1 {
            ln_norm - y * y / (2.0 * s2)
        } else {
            // log-sum-exp of the two branches; the ln cosh form cancels badly
            // near y = +-2 for small sigma
            let a = -(y - 2.0) * (y - 2.0) / (2.0 * s2);
            let b = -(y + 2.0) * (y + 2.0) / (2.0 * s2);
            let (hi, lo) = if a > b { (a, b) } else { (b, a) };
            ln_norm - LN_2 + hi + (lo - hi).exp().ln_1p()
        }
    }

    /// Symbol LLR `ln(L[y|0] / L[y|1]) = ln cosh(2y/sigma^2) - 2/sigma^2`, in nats.
    pub fn llr(&self, y: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        ln_cosh(2.0 * y / s2) - 2.0 / s2
    }

    pub fn symbol(&self, z: Bit, y: f64) -> VirtualSymbol {
        VirtualSymbol { z, y }
    }
}

impl VirtualChannel for ChannelParams {
    fn sample_output<R: Rng + ?Sized>(&self, z: Bit, rng: &mut R) -> f64 {
        ChannelParams::sample_output(self, z, rng)
    }

    fn llr(&self, y: f64) -> f64 {
        ChannelParams::llr(self, y)
    }
}

/// One use of the virtual channel: the XOR bit and what the relay saw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualSymbol {
    pub z: Bit,
    pub y: f64,
}

/// Plain BPSK over AWGN (`z=0 -> +1`, `z=1 -> -1`). Output-symmetric, so it is
/// used to check that the asymmetric machinery degenerates correctly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpskAwgn {
    pub sigma: f64,
}

impl VirtualChannel for BpskAwgn {
    fn sample_output<R: Rng + ?Sized>(&self, z: Bit, rng: &mut R) -> f64 {
        let w: f64 = rng.sample(StandardNormal);
        bipolar(z) + self.sigma * w
    }

    fn llr(&self, y: f64) -> f64 {
        2.0 * y / (self.sigma * self.sigma)
    }
}

/// `ln cosh(a)` without overflow: `|a| + ln(1 + e^{-2|a|}) - ln 2`.
#[inline]
pub fn ln_cosh(a: f64) -> f64 {
    let a = a.abs();
    a + (1.0 + (-2.0 * a).exp()).ln() - LN_2
}

#[inline]
fn gaussian_pdf(y: f64, mean: f64, sigma: f64) -> f64 {
    let d = (y - mean) / sigma;
    (-0.5 * d * d).exp() / (sigma * (2.0 * PI).sqrt())
}

/// Integration rule for the information-rate integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// The integration range is `[-2 - w*sigma, 2 + w*sigma]`.
    pub half_width_sigmas: f64,
    /// Absolute tolerance of the adaptive rule over the whole range.
    pub tolerance: f64,
    pub max_depth: u32,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            half_width_sigmas: 12.0,
            tolerance: 1e-11,
            max_depth: 24,
        }
    }
}

/// Normalizations of both likelihoods and the entropy pieces of the rate, as
/// produced by one quadrature pass.
#[derive(Debug, Clone, Copy)]
struct RateIntegrals {
    mass0: f64,
    mass1: f64,
    /// `int P log2 P`
    p_log_p: f64,
    /// `int L0 log2 L0`
    l0_log_l0: f64,
}

fn x_log2_x_from_ln(ln_x: f64) -> f64 {
    // 0 log 0 = 0
    let x = ln_x.exp();
    if x == 0.0 {
        0.0
    } else {
        x * ln_x / LN_2
    }
}

fn rate_integrals(params: &ChannelParams, quad: &QuadratureConfig) -> RateIntegrals {
    let s = params.sigma();
    let half = 2.0 + quad.half_width_sigmas * s;
    // at least ~2 panels per sigma so the adaptive rule sees every peak
    let panels = ((4.0 * half / s).ceil() as usize).clamp(64, 200_000);
    let f = |y: f64| {
        let l0 = params.ln_likelihood(y, 0);
        let l1 = params.ln_likelihood(y, 1);
        let (hi, lo) = if l0 > l1 { (l0, l1) } else { (l1, l0) };
        let ln_p = hi + (lo - hi).exp().ln_1p() - LN_2;
        [
            l0.exp(),
            l1.exp(),
            x_log2_x_from_ln(ln_p),
            x_log2_x_from_ln(l0),
        ]
    };
    let r = adaptive_simpson(&f, -half, half, panels, quad.tolerance, quad.max_depth);
    RateIntegrals {
        mass0: r.value[0],
        mass1: r.value[1],
        p_log_p: r.value[2],
        l0_log_l0: r.value[3],
    }
}

/// Mutual information in bits between a uniform `Z` and `Y`:
/// `h(Y) - h(Y|Z)`, with `h(Y|Z=1) = 1/2 log2(2 pi e sigma^2)`. Clamped to `[0, 1]`.
pub fn symmetric_information_rate(params: &ChannelParams, quad: &QuadratureConfig) -> Result<f64> {
    let r = rate_integrals(params, quad);
    for (z, mass) in [(0, r.mass0), (1, r.mass1)] {
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::QuadratureFailure(format!(
                "L[y|{z}] integrates to {mass} at sigma={}",
                params.sigma()
            )));
        }
    }
    let s2 = params.sigma() * params.sigma();
    let c = -r.p_log_p + 0.5 * r.l0_log_l0 - 0.25 * (2.0 * PI * s2 * std::f64::consts::E).log2();
    Ok(c.clamp(0.0, 1.0))
}

const SIGMA_SYM_LO: f64 = 1e-3;
const SIGMA_SYM_HI: f64 = 1e3;

/// Noise level at which the symmetric information rate equals `rate`.
pub fn sigma_sym(rate: f64, quad: &QuadratureConfig, tol: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::InvalidConfig(format!("rate must lie in (0,1), got {rate}")));
    }
    let c = |s: f64| symmetric_information_rate(&ChannelParams::new(s)?, quad);
    let (mut lo, mut hi) = (SIGMA_SYM_LO, SIGMA_SYM_HI);
    let (c_lo, c_hi) = (c(lo)?, c(hi)?);
    if !(c_lo >= rate && c_hi <= rate) {
        return Err(Error::BracketFailure(format!(
            "C_sym ranges over [{c_hi}, {c_lo}] on [{lo}, {hi}] and does not straddle {rate}"
        )));
    }
    // bisect in log(sigma); the bracket spans six decades
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let cm = c(mid)?;
        if (cm - rate).abs() <= tol {
            return Ok(mid);
        }
        if cm > rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::BracketFailure(format!(
        "bisection did not reach |C_sym - {rate}| <= {tol}"
    )))
}
