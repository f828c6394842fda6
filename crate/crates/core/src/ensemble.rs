//! Regular and spatially coupled LDPC ensembles.
//!
//! A `(d_l, d_r, L)` coupled protograph is built from `L` copies of the
//! uncoupled `(d_l, d_r)` protograph (a bundle of `k = d_r/d_l` variable nodes
//! and one check). Each bundle `i in 1..=L` is wired to the checks
//! `i - d_hat ..= i + d_hat`, `d_hat = (d_l - 1)/2`, and `d_hat` extra checks are
//! appended at each end, so check labels run over `1 - d_hat ..= L + d_hat`.
//! Every (bundle, check) connection carries `k` edge sockets on the check side
//! and one socket on each variable node of the bundle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `(d_l, d_r)`-regular LDPC ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularEnsemble {
    pub d_l: usize,
    pub d_r: usize,
}

impl RegularEnsemble {
    /// Validated ensemble compatible with spatial coupling (`d_l | d_r`).
    pub fn new(d_l: usize, d_r: usize) -> Result<Self> {
        let e = Self::new_relaxed(d_l, d_r)?;
        if !d_r.is_multiple_of(d_l) {
            return Err(Error::InvalidDegree {
                d_l,
                d_r,
                reason: "d_r must be a multiple of d_l".into(),
            });
        }
        Ok(e)
    }

    /// Plain regular ensemble without the divisibility requirement.
    pub fn new_relaxed(d_l: usize, d_r: usize) -> Result<Self> {
        if d_l < 2 {
            return Err(Error::InvalidDegree {
                d_l,
                d_r,
                reason: "d_l must be at least 2".into(),
            });
        }
        if d_r <= d_l {
            return Err(Error::InvalidDegree {
                d_l,
                d_r,
                reason: "d_r must exceed d_l".into(),
            });
        }
        Ok(Self { d_l, d_r })
    }

    pub fn design_rate(&self) -> f64 {
        1.0 - self.d_l as f64 / self.d_r as f64
    }
}

/// Design rate of a protograph; `degenerate` marks chains too short to carry
/// any information (`rate <= 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignRate {
    pub rate: f64,
    pub degenerate: bool,
}

/// The `(d_l, d_r, L)` spatially coupled protograph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScProtograph {
    d_l: usize,
    d_r: usize,
    chain_length: usize,
}

impl ScProtograph {
    pub fn new(d_l: usize, d_r: usize, chain_length: usize) -> Result<Self> {
        RegularEnsemble::new(d_l, d_r)?;
        if d_l.is_multiple_of(2) {
            return Err(Error::InvalidDegree {
                d_l,
                d_r,
                reason: "d_l must be odd so that (d_l-1)/2 is an integer".into(),
            });
        }
        if chain_length < 1 {
            return Err(Error::InvalidChain(chain_length));
        }
        Ok(Self {
            d_l,
            d_r,
            chain_length,
        })
    }

    pub fn d_l(&self) -> usize {
        self.d_l
    }

    pub fn d_r(&self) -> usize {
        self.d_r
    }

    pub fn chain_length(&self) -> usize {
        self.chain_length
    }

    /// Variable nodes per bundle.
    pub fn k(&self) -> usize {
        self.d_r / self.d_l
    }

    /// Coupling half-width `(d_l - 1)/2`.
    pub fn d_hat(&self) -> usize {
        (self.d_l - 1) / 2
    }

    pub fn base(&self) -> RegularEnsemble {
        RegularEnsemble {
            d_l: self.d_l,
            d_r: self.d_r,
        }
    }

    pub fn variable_count(&self) -> usize {
        self.k() * self.chain_length
    }

    pub fn check_count(&self) -> usize {
        self.chain_length + 2 * self.d_hat()
    }

    /// Bundle labels `1..=L`.
    pub fn bundles(&self) -> std::ops::RangeInclusive<i64> {
        1..=self.chain_length as i64
    }

    /// Check labels `1 - d_hat ..= L + d_hat`.
    pub fn check_labels(&self) -> std::ops::RangeInclusive<i64> {
        let d = self.d_hat() as i64;
        (1 - d)..=(self.chain_length as i64 + d)
    }

    /// Checks adjacent to bundle `i`, in increasing label order.
    pub fn bundle_neighbors(&self, i: i64) -> Vec<i64> {
        let d = self.d_hat() as i64;
        ((i - d)..=(i + d)).collect()
    }

    /// Bundles adjacent to check `a`, in increasing label order.
    pub fn check_neighbors(&self, a: i64) -> Vec<i64> {
        let d = self.d_hat() as i64;
        let l = self.chain_length as i64;
        ((a - d).max(1)..=(a + d).min(l)).collect()
    }

    pub fn check_degree(&self, a: i64) -> usize {
        self.k() * self.check_neighbors(a).len()
    }

    /// Position of check label `a` in `0..check_count()`.
    pub fn check_index(&self, a: i64) -> usize {
        (a - (1 - self.d_hat() as i64)) as usize
    }

    pub fn design_rate(&self) -> DesignRate {
        let rate = 1.0 - self.check_count() as f64 / self.variable_count() as f64;
        DesignRate {
            rate,
            degenerate: rate <= 0.0,
        }
    }

    pub fn describe(&self) -> ProtographDescription {
        ProtographDescription {
            kind: "coupled".into(),
            d_l: self.d_l,
            d_r: self.d_r,
            chain_length: Some(self.chain_length),
            k: self.k(),
            d_hat: self.d_hat(),
            design_rate: self.design_rate(),
            variable_count: self.variable_count(),
            check_count: self.check_count(),
            bundles: self
                .bundles()
                .map(|i| BundleDescription {
                    label: i,
                    variable_degree: self.d_l,
                    checks: self.bundle_neighbors(i),
                })
                .collect(),
            checks: self
                .check_labels()
                .map(|a| CheckDescription {
                    label: a,
                    degree: self.check_degree(a),
                    bundles: self.check_neighbors(a),
                })
                .collect(),
        }
    }
}

/// Either ensemble family, as accepted by density evolution and the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ensemble {
    Regular(RegularEnsemble),
    Coupled(ScProtograph),
}

impl Ensemble {
    pub fn design_rate(&self) -> f64 {
        match self {
            Ensemble::Regular(e) => e.design_rate(),
            Ensemble::Coupled(p) => p.design_rate().rate,
        }
    }

    pub fn degrees(&self) -> (usize, usize) {
        match self {
            Ensemble::Regular(e) => (e.d_l, e.d_r),
            Ensemble::Coupled(p) => (p.d_l, p.d_r),
        }
    }

    pub fn chain_length(&self) -> Option<usize> {
        match self {
            Ensemble::Regular(_) => None,
            Ensemble::Coupled(p) => Some(p.chain_length),
        }
    }

    /// Short label such as `(3,6)` or `(3,6,25)`.
    pub fn label(&self) -> String {
        match self {
            Ensemble::Regular(e) => format!("({},{})", e.d_l, e.d_r),
            Ensemble::Coupled(p) => format!("({},{},{})", p.d_l, p.d_r, p.chain_length),
        }
    }

    pub fn describe(&self) -> ProtographDescription {
        match self {
            Ensemble::Coupled(p) => p.describe(),
            Ensemble::Regular(e) => {
                let k = e.d_r / e.d_l;
                ProtographDescription {
                    kind: "regular".into(),
                    d_l: e.d_l,
                    d_r: e.d_r,
                    chain_length: None,
                    k,
                    d_hat: (e.d_l - 1) / 2,
                    design_rate: DesignRate {
                        rate: e.design_rate(),
                        degenerate: false,
                    },
                    variable_count: k,
                    check_count: 1,
                    bundles: vec![BundleDescription {
                        label: 1,
                        variable_degree: e.d_l,
                        checks: vec![1; e.d_l],
                    }],
                    checks: vec![CheckDescription {
                        label: 1,
                        degree: e.d_r,
                        bundles: vec![1],
                    }],
                }
            }
        }
    }
}

impl From<RegularEnsemble> for Ensemble {
    fn from(e: RegularEnsemble) -> Self {
        Ensemble::Regular(e)
    }
}

impl From<ScProtograph> for Ensemble {
    fn from(p: ScProtograph) -> Self {
        Ensemble::Coupled(p)
    }
}

/// JSON view of a protograph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtographDescription {
    pub kind: String,
    pub d_l: usize,
    pub d_r: usize,
    pub chain_length: Option<usize>,
    pub k: usize,
    pub d_hat: usize,
    pub design_rate: DesignRate,
    pub variable_count: usize,
    pub check_count: usize,
    pub bundles: Vec<BundleDescription>,
    pub checks: Vec<CheckDescription>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleDescription {
    pub label: i64,
    pub variable_degree: usize,
    pub checks: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDescription {
    pub label: i64,
    pub degree: usize,
    pub bundles: Vec<i64>,
}
