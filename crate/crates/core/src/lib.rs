//! Density evolution and belief-propagation tools for LDPC and spatially
//! coupled LDPC codes over the binary two-way relay channel.
//!
//! The relay observes the superposition of two BPSK codewords in Gaussian
//! noise and decodes their XOR. [`channel`] models the induced virtual channel,
//! [`ensemble`] builds regular and coupled protographs, [`de`] runs population
//! dynamics density evolution on them, [`threshold`] searches BP thresholds,
//! and [`oracle`] provides finite-length BP and exhaustive ML decoding to check
//! the asymptotic predictions.

pub mod channel;
pub mod de;
pub mod ensemble;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod threshold;

pub use channel::{Bit, ChannelParams, QuadratureConfig, VirtualChannel};
pub use ensemble::{Ensemble, RegularEnsemble, ScProtograph};
pub use error::{Error, Result};
