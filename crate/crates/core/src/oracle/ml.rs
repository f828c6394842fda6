//! Exhaustive maximum-likelihood decoding under the per-symbol virtual
//! channel, for codes small enough to enumerate.

use super::codeword::CodeSampler;
use crate::channel::{Bit, ChannelParams};
use crate::error::{Error, Result};

pub const MAX_ML_DIMENSION: usize = 20;

/// All codewords, in the order of their free-coordinate index.
pub fn enumerate_codewords(code: &CodeSampler) -> Result<Vec<Vec<Bit>>> {
    let k = code.dimension();
    if k > MAX_ML_DIMENSION {
        return Err(Error::DimensionTooLarge(k));
    }
    let basis = code.basis();
    let mut words = Vec::with_capacity(1 << k);
    let mut x = vec![0u8; code.n()];
    words.push(x.clone());
    // Gray-code walk: step i flips the basis vector at the lowest set bit
    for i in 1u64..(1 << k) {
        let b = &basis[i.trailing_zeros() as usize];
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi ^= bi;
        }
        words.push(x.clone());
    }
    Ok(words)
}

/// `argmax_z sum_t ln L[y_t | z_t]` over `codewords`, ties going to the
/// lexicographically smallest word.
pub fn ml_decode(codewords: &[Vec<Bit>], y: &[f64], channel: &ChannelParams) -> Vec<Bit> {
    let table: Vec<[f64; 2]> = y
        .iter()
        .map(|&v| [channel.ln_likelihood(v, 0), channel.ln_likelihood(v, 1)])
        .collect();
    let mut best: Option<(f64, &Vec<Bit>)> = None;
    for w in codewords {
        assert_eq!(w.len(), y.len());
        let score: f64 = w.iter().zip(&table).map(|(&b, l)| l[b as usize]).sum();
        best = match best {
            Some((s, bw)) if s > score || (s == score && bw <= w) => Some((s, bw)),
            _ => Some((score, w)),
        };
    }
    best.map(|(_, w)| w.clone()).unwrap_or_else(|| vec![0; y.len()])
}

pub fn ml_decode_exhaustive(code: &CodeSampler, y: &[f64], channel: &ChannelParams) -> Result<Vec<Bit>> {
    Ok(ml_decode(&enumerate_codewords(code)?, y, channel))
}
