//! BP threshold search by bisection on density-evolution decodability, and
//! extrapolation of coupled-chain thresholds to infinite chain length.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::channel::{sigma_sym, ChannelParams, QuadratureConfig};
use crate::de::{de_run, DeConfig, DeTrace};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};

/// One density-evolution run at a fixed noise level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub sigma: f64,
    pub decodable: bool,
    pub iterations: usize,
    pub final_max_ber: f64,
}

impl Probe {
    fn from_trace(sigma: f64, trace: &DeTrace) -> Self {
        Self {
            sigma,
            decodable: trace.decodable,
            iterations: trace.len(),
            final_max_ber: trace.final_max_ber(),
        }
    }
}

/// Bracket on the BP threshold with the witness runs at both ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub ensemble: String,
    pub design_rate: f64,
    /// Largest noise level seen decodable.
    pub lower: f64,
    /// Smallest noise level seen not decodable.
    pub upper: f64,
    pub estimate: f64,
    pub tolerance: f64,
    pub config: DeConfig,
    /// Every probe, in the order run.
    pub probes: Vec<Probe>,
    pub lower_witness: DeTrace,
    pub upper_witness: DeTrace,
    /// Finite iteration caps bias thresholds downward near the true value.
    pub note: String,
}

impl ThresholdResult {
    /// Pairs of probes that contradict monotone decodability in sigma: a
    /// decodable probe above a non-decodable one.
    pub fn monotonicity_violations(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for bad in self.probes.iter().filter(|p| !p.decodable) {
            for good in self.probes.iter().filter(|p| p.decodable) {
                if good.sigma > bad.sigma {
                    out.push((bad.sigma, good.sigma));
                }
            }
        }
        out
    }
}

/// Runs density evolution at `sigma` and reports the zero-BER verdict.
pub fn is_decodable(ensemble: &Ensemble, sigma: f64, cfg: &DeConfig) -> Result<(bool, DeTrace)> {
    let trace = de_run(ensemble, &ChannelParams::new(sigma)?, cfg)?;
    Ok((trace.decodable, trace))
}

/// Default search bracket for an ensemble.
pub fn default_bracket(ensemble: &Ensemble) -> (f64, f64) {
    if ensemble.design_rate() > 0.6 {
        (0.3, 0.9)
    } else {
        (0.4, 1.0)
    }
}

/// Bisects on sigma until the decodable/non-decodable bracket is no wider
/// than `tol`. If an end of the initial bracket has the wrong verdict, that
/// end is pushed out by the bracket width once before giving up.
pub fn bp_threshold(
    ensemble: &Ensemble,
    cfg: &DeConfig,
    bracket: (f64, f64),
    tol: f64,
) -> Result<ThresholdResult> {
    let (mut lo, mut hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::BracketFailure(format!("invalid bracket [{lo}, {hi}]")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    let mut probes = Vec::new();
    let mut probe = |sigma: f64| -> Result<DeTrace> {
        let (_, trace) = is_decodable(ensemble, sigma, cfg)?;
        log::info!(
            "{} sigma={sigma:.5}: decodable={} after {} iterations",
            ensemble.label(),
            trace.decodable,
            trace.len()
        );
        probes.push(Probe::from_trace(sigma, &trace));
        Ok(trace)
    };

    let width = hi - lo;
    let mut lo_trace = probe(lo)?;
    if !lo_trace.decodable {
        lo = (lo - width).max(lo / 2.0);
        lo_trace = probe(lo)?;
        if !lo_trace.decodable {
            return Err(Error::BracketFailure(format!(
                "{} is not decodable at the lower end sigma={lo}",
                ensemble.label()
            )));
        }
    }
    let mut hi_trace = probe(hi)?;
    if hi_trace.decodable {
        hi += width;
        hi_trace = probe(hi)?;
        if hi_trace.decodable {
            return Err(Error::BracketFailure(format!(
                "{} is still decodable at the upper end sigma={hi}",
                ensemble.label()
            )));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let trace = probe(mid)?;
        if trace.decodable {
            lo = mid;
            lo_trace = trace;
        } else {
            hi = mid;
            hi_trace = trace;
        }
    }
    Ok(ThresholdResult {
        ensemble: ensemble.label(),
        design_rate: ensemble.design_rate(),
        lower: lo,
        upper: hi,
        estimate: 0.5 * (lo + hi),
        tolerance: tol,
        config: cfg.clone(),
        probes,
        lower_witness: lo_trace,
        upper_witness: hi_trace,
        note: format!(
            "decodable means zero estimated BER for {} consecutive iterations within T={}; \
             slow convergence near the threshold biases the estimate downward",
            cfg.zero_streak, cfg.max_iterations
        ),
    })
}

/// Least-squares fit of `sigma*(L) = sigma_inf + c / L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub sigma_inf: f64,
    pub slope: f64,
    /// `(L, sigma*_L)` as supplied.
    pub points: Vec<(usize, f64)>,
    /// Observed minus fitted, per point.
    pub residuals: Vec<f64>,
}

pub fn extrapolate_threshold(points: &[(usize, f64)]) -> Result<Extrapolation> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(l, _)| l == 0) {
        return Err(Error::DegenerateFit("chain length 0".into()));
    }
    if points.iter().all(|&(l, _)| l == points[0].0) {
        return Err(Error::DegenerateFit("all chain lengths are equal".into()));
    }
    let xs: Vec<f64> = points.iter().map(|&(l, _)| 1.0 / l as f64).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, s)| s).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let sigma_inf = my - slope * mx;
    let residuals = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (sigma_inf + slope * x))
        .collect();
    Ok(Extrapolation {
        sigma_inf,
        slope,
        points: points.to_vec(),
        residuals,
    })
}

/// One line of the threshold-versus-rate / threshold-versus-L tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub ensemble: String,
    pub chain_length: Option<usize>,
    pub rate: f64,
    pub threshold: f64,
    /// Noise level at which the symmetric information rate equals `rate`;
    /// absent for non-positive rates.
    pub sigma_sym: Option<f64>,
}

impl SummaryRow {
    pub fn new(ensemble: &Ensemble, result: &ThresholdResult) -> Result<Self> {
        let rate = ensemble.design_rate();
        let sigma_sym = if rate > 0.0 && rate < 1.0 {
            Some(sigma_sym(rate, &QuadratureConfig::default(), 1e-7)?)
        } else {
            None
        };
        Ok(Self {
            ensemble: ensemble.label(),
            chain_length: ensemble.chain_length(),
            rate,
            threshold: result.estimate,
            sigma_sym,
        })
    }
}

pub fn write_summary_csv<W: Write + ?Sized>(out: &mut W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(out, "ensemble,L,rate,sigma_star,sigma_sym")?;
    for r in rows {
        writeln!(
            out,
            "\"{}\",{},{},{},{}",
            r.ensemble,
            r.chain_length.map_or(String::new(), |l| l.to_string()),
            r.rate,
            r.threshold,
            r.sigma_sym.map_or(String::new(), |s| s.to_string())
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::RegularEnsemble;

    #[test]
    fn recovers_exact_family() {
        let pts: Vec<(usize, f64)> = [10, 25, 50].iter().map(|&l| (l, 0.785 + 0.3 / l as f64)).collect();
        let e = extrapolate_threshold(&pts).unwrap();
        assert!((e.sigma_inf - 0.785).abs() < 1e-6);
        assert!((e.slope - 0.3).abs() < 1e-6);
        assert!(e.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn constant_series() {
        let e = extrapolate_threshold(&[(10, 0.7), (25, 0.7), (50, 0.7)]).unwrap();
        assert!((e.sigma_inf - 0.7).abs() < 1e-12);
        assert!(e.slope.abs() < 1e-12);
    }

    #[test]
    fn degenerate_fits() {
        assert!(matches!(
            extrapolate_threshold(&[(10, 0.7), (10, 0.71), (10, 0.72)]),
            Err(Error::DegenerateFit(_))
        ));
        assert!(extrapolate_threshold(&[(10, 0.7), (20, 0.71)]).is_err());
    }

    #[test]
    fn violations_detected() {
        let e: Ensemble = RegularEnsemble::new(3, 6).unwrap().into();
        let cfg = DeConfig {
            population_size: 200,
            max_iterations: 1,
            ..DeConfig::default()
        };
        let (_, trace) = is_decodable(&e, 0.5, &cfg).unwrap();
        let mut r = ThresholdResult {
            ensemble: e.label(),
            design_rate: 0.5,
            lower: 0.5,
            upper: 0.6,
            estimate: 0.55,
            tolerance: 0.1,
            config: cfg,
            probes: vec![],
            lower_witness: trace.clone(),
            upper_witness: trace,
            note: String::new(),
        };
        let p = |sigma, decodable| Probe {
            sigma,
            decodable,
            iterations: 1,
            final_max_ber: 0.0,
        };
        r.probes = vec![p(0.5, true), p(0.7, false), p(0.6, true)];
        assert!(r.monotonicity_violations().is_empty());
        r.probes.push(p(0.8, true));
        assert_eq!(r.monotonicity_violations(), vec![(0.7, 0.8)]);
    }

    #[test]
    fn bracket_failure_reported() {
        let e: Ensemble = RegularEnsemble::new(3, 6).unwrap().into();
        let cfg = DeConfig {
            population_size: 1000,
            ber_samples: 1000,
            max_iterations: 60,
            ..DeConfig::default()
        };
        // far above threshold on both ends, even after expansion
        let r = bp_threshold(&e, &cfg, (1.5, 1.6), 1e-3);
        assert!(matches!(r, Err(Error::BracketFailure(_))));
    }

    #[test]
    fn regular_threshold_coarse() {
        let e: Ensemble = RegularEnsemble::new(3, 6).unwrap().into();
        let cfg = DeConfig {
            population_size: 2000,
            ber_samples: 2000,
            max_iterations: 200,
            ..DeConfig::default()
        };
        let r = bp_threshold(&e, &cfg, (0.5, 0.9), 0.02).unwrap();
        assert!(r.upper - r.lower <= 0.02);
        assert!(r.lower_witness.decodable && !r.upper_witness.decodable);
        assert!(r.monotonicity_violations().is_empty());
        assert!((r.estimate - 0.742).abs() < 0.05, "{}", r.estimate);
    }
}
