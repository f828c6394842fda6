use serde::{Deserialize, Serialize};

use crate::channel::Bit;

/// Default message clip bound, in nats.
pub const DEFAULT_CLIP: f64 = 50.0;

/// Largest `|prod tanh|` passed to `atanh`.
pub const TANH_GUARD: f64 = 1.0 - 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    VariableToCheck,
    CheckToVariable,
}

/// A bag of `N` LLR samples approximating one conditional message density,
/// for one directed protograph edge and one value of the transmitted bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub direction: Direction,
    /// Bundle label of the variable end of the edge.
    pub bundle: i64,
    /// Check label of the check end of the edge.
    pub check: i64,
    pub z: Bit,
    pub samples: Vec<f64>,
}

impl Population {
    pub fn zeros(direction: Direction, bundle: i64, check: i64, z: Bit, n: usize) -> Self {
        Self {
            direction,
            bundle,
            check,
            z,
            samples: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[inline]
pub fn clip(m: f64, bound: f64) -> f64 {
    m.clamp(-bound, bound)
}

/// `2 atanh(t)` with `|t|` guarded below one, clipped to `+-bound`.
#[inline]
pub fn check_output_from_product(t: f64, bound: f64) -> f64 {
    let t = t.clamp(-TANH_GUARD, TANH_GUARD);
    // 2 atanh(t)
    clip(((1.0 + t) / (1.0 - t)).ln(), bound)
}

/// `tanh(m/2)` through a single exponential.
#[inline]
pub fn tanh_half(m: f64) -> f64 {
    let e = (-m.abs()).exp();
    ((1.0 - e) / (1.0 + e)).copysign(m)
}

/// Check node rule on incoming LLRs: `2 atanh(prod tanh(m/2))`, clipped.
pub fn check_update_sample(incoming: &[f64], bound: f64) -> f64 {
    let t: f64 = incoming.iter().map(|&m| tanh_half(m)).product();
    check_output_from_product(t, bound)
}
