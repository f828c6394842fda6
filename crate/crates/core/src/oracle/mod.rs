//! Finite-length ground truth: concrete regular LDPC codes, codeword
//! transmission over the relay channel, belief propagation and exhaustive
//! maximum-likelihood decoding, and a Monte Carlo harness.

pub mod bp;
pub mod codeword;
pub mod gf2;
pub mod ml;
pub mod montecarlo;
pub mod tanner;

pub use bp::{bp_decode, bp_decode_with, BpOutcome, BpTrace};
pub use codeword::{codeword_sampler, transmit, CodeSampler, CodewordPair};
pub use ml::{enumerate_codewords, ml_decode, ml_decode_exhaustive, MAX_ML_DIMENSION};
pub use montecarlo::{compare_ml_bp, monte_carlo_ber, McConfig, McResult, MlComparison, TrialRecord};
pub use tanner::{sample_tanner_graph, TannerGraph};
