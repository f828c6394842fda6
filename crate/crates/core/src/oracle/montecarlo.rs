//! Monte Carlo BER/FER estimation over fresh graphs, codewords and noise.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bp::bp_decode_with;
use super::codeword::{codeword_sampler, transmit, CodeSampler};
use super::ml::{enumerate_codewords, ml_decode};
use super::tanner::{sample_tanner_graph, TannerGraph};
use crate::channel::{Bit, ChannelParams};
use crate::de::{stream, DEFAULT_CLIP};
use crate::error::{Error, Result};

const TAG_GRAPH: u64 = 0x6772;
const TAG_TRIAL: u64 = 0x7472;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub d_l: usize,
    pub d_r: usize,
    pub n: usize,
    pub trials: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Draw a new graph for every trial; otherwise one graph serves all.
    pub fresh_graph: bool,
    pub parallel: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            d_l: 3,
            d_r: 6,
            n: 100_000,
            trials: 20,
            max_iters: 10,
            seed: 0x5eed_2017,
            fresh_graph: true,
            parallel: true,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        if self.d_l == 0 || self.d_r == 0 || self.n == 0 || !(self.n * self.d_l).is_multiple_of(self.d_r) {
            return Err(Error::SizeMismatch {
                sockets: self.n * self.d_l,
                d_r: self.d_r,
            });
        }
        Ok(())
    }
}

/// Bit errors after each iteration of one trial. A decode that stopped early
/// keeps its final decisions for the remaining iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub errors: Vec<u64>,
    pub iterations: usize,
    pub converged: bool,
    pub block_error: bool,
    pub dimension: usize,
    pub parallel_edges: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub config: McConfig,
    pub sigma: f64,
    /// BER after iterations `1..=max_iters`.
    pub ber: Vec<f64>,
    /// Binomial standard error `sqrt(p (1 - p) / (trials n))`.
    pub std_err: Vec<f64>,
    pub fer: f64,
    pub fer_std_err: f64,
    pub trials: Vec<TrialRecord>,
}

fn binomial_se(p: f64, count: f64) -> f64 {
    (p * (1.0 - p) / count).sqrt()
}

fn run_trial(cfg: &McConfig, channel: &ChannelParams, shared: Option<&(TannerGraph, CodeSampler)>, t: usize) -> Result<TrialRecord> {
    let mut rng = stream(cfg.seed, TAG_TRIAL, 0, t, 0);
    let owned;
    let (graph, code) = match shared {
        Some((g, c)) => (g, c),
        None => {
            let g = sample_tanner_graph(cfg.d_l, cfg.d_r, cfg.n, &mut rng)?;
            let c = CodeSampler::new(&g);
            owned = (g, c);
            (&owned.0, &owned.1)
        }
    };
    let pair = codeword_sampler(code, &mut rng);
    let y = transmit(&pair, channel, &mut rng);
    let mut errors = Vec::with_capacity(cfg.max_iters);
    let outcome = bp_decode_with(graph, &y, channel, cfg.max_iters, DEFAULT_CLIP, |_, hard| {
        errors.push(count_errors(hard, &pair.z));
    });
    let last = *errors.last().expect("at least one iteration");
    errors.resize(cfg.max_iters, last);
    Ok(TrialRecord {
        errors,
        iterations: outcome.iterations,
        converged: outcome.converged,
        block_error: outcome.estimate != pair.z,
        dimension: code.dimension(),
        parallel_edges: graph.has_parallel_edges(),
    })
}

fn count_errors(a: &[Bit], b: &[Bit]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Runs `cfg.trials` independent decodes. Trial `t` draws everything from
/// its own stream, so results do not depend on scheduling.
pub fn monte_carlo_ber(cfg: &McConfig, channel: &ChannelParams) -> Result<McResult> {
    cfg.validate()?;
    let shared = if cfg.fresh_graph {
        None
    } else {
        let mut rng = stream(cfg.seed, TAG_GRAPH, 0, 0, 0);
        let g = sample_tanner_graph(cfg.d_l, cfg.d_r, cfg.n, &mut rng)?;
        let c = CodeSampler::new(&g);
        Some((g, c))
    };
    let trials: Vec<TrialRecord> = if cfg.parallel {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, channel, shared.as_ref(), t))
            .collect::<Result<_>>()?
    } else {
        (0..cfg.trials)
            .map(|t| run_trial(cfg, channel, shared.as_ref(), t))
            .collect::<Result<_>>()?
    };
    let bits = (cfg.trials * cfg.n) as f64;
    let ber: Vec<f64> = (0..cfg.max_iters)
        .map(|i| trials.iter().map(|r| r.errors[i]).sum::<u64>() as f64 / bits)
        .collect();
    let std_err = ber.iter().map(|&p| binomial_se(p, bits)).collect();
    let fer = trials.iter().filter(|r| r.block_error).count() as f64 / cfg.trials as f64;
    Ok(McResult {
        config: cfg.clone(),
        sigma: channel.sigma(),
        ber,
        std_err,
        fer,
        fer_std_err: binomial_se(fer, cfg.trials as f64),
        trials,
    })
}

impl McResult {
    /// Per-iteration rows `iteration,ber,std_err`, preceded by `#` metadata.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W, extra_meta: &[(String, String)]) -> io::Result<()> {
        for (k, v) in extra_meta {
            writeln!(out, "# {k}={v}")?;
        }
        let c = &self.config;
        writeln!(out, "# d_l={} d_r={} n={} sigma={}", c.d_l, c.d_r, c.n, self.sigma)?;
        writeln!(out, "# trials={} max_iters={} seed={} fresh_graph={}", c.trials, c.max_iters, c.seed, c.fresh_graph)?;
        writeln!(out, "# fer={} fer_std_err={}", self.fer, self.fer_std_err)?;
        writeln!(out, "iteration,ber,std_err")?;
        for (i, (b, s)) in self.ber.iter().zip(&self.std_err).enumerate() {
            writeln!(out, "{},{},{}", i + 1, b, s)?;
        }
        Ok(())
    }

    /// Rows `trial,iteration,ber`.
    pub fn write_trials_csv<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "trial,iteration,ber")?;
        for (t, r) in self.trials.iter().enumerate() {
            for (i, &e) in r.errors.iter().enumerate() {
                writeln!(out, "{},{},{}", t, i + 1, e as f64 / self.config.n as f64)?;
            }
        }
        Ok(())
    }
}

/// Block-error comparison of BP and exhaustive ML on one small code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlComparison {
    pub n: usize,
    pub dimension: usize,
    pub sigma: f64,
    pub trials: usize,
    pub bp_fer: f64,
    pub bp_std_err: f64,
    pub ml_fer: f64,
    pub ml_std_err: f64,
    pub parallel_edges: bool,
}

/// Draws one code from `cfg`, then decodes each trial with both decoders on
/// the same observation.
pub fn compare_ml_bp(cfg: &McConfig, channel: &ChannelParams) -> Result<MlComparison> {
    cfg.validate()?;
    let mut rng = stream(cfg.seed, TAG_GRAPH, 0, 0, 0);
    let graph = sample_tanner_graph(cfg.d_l, cfg.d_r, cfg.n, &mut rng)?;
    let code = CodeSampler::new(&graph);
    let words = enumerate_codewords(&code)?;
    let trial = |t: usize| {
        let mut rng = stream(cfg.seed, TAG_TRIAL, 0, t, 0);
        let pair = codeword_sampler(&code, &mut rng);
        let y = transmit(&pair, channel, &mut rng);
        let bp = bp_decode_with(&graph, &y, channel, cfg.max_iters, DEFAULT_CLIP, |_, _| {});
        let ml = ml_decode(&words, &y, channel);
        (bp.estimate != pair.z, ml != pair.z)
    };
    let outcomes: Vec<(bool, bool)> = if cfg.parallel {
        (0..cfg.trials).into_par_iter().map(trial).collect()
    } else {
        (0..cfg.trials).map(trial).collect()
    };
    let count = cfg.trials as f64;
    let bp_fer = outcomes.iter().filter(|o| o.0).count() as f64 / count;
    let ml_fer = outcomes.iter().filter(|o| o.1).count() as f64 / count;
    Ok(MlComparison {
        n: cfg.n,
        dimension: code.dimension(),
        sigma: channel.sigma(),
        trials: cfg.trials,
        bp_fer,
        bp_std_err: binomial_se(bp_fer, count),
        ml_fer,
        ml_std_err: binomial_se(ml_fer, count),
        parallel_edges: graph.has_parallel_edges(),
    })
}
