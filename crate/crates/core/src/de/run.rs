use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::engine::{ber_rng, BerEstimate, DeConfig, DeState};
use super::graph::DeGraph;
use crate::channel::{ChannelParams, VirtualChannel};
use crate::ensemble::Ensemble;
use crate::error::Result;

/// Per-iteration, per-bundle BER history of one density-evolution run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeTrace {
    pub ensemble: String,
    pub sigma: Option<f64>,
    pub config: DeConfig,
    /// Bundle labels, one column of `ber` each.
    pub positions: Vec<i64>,
    /// `ber[t][b]` is the estimate after iteration `t + 1` at bundle `b`.
    pub ber: Vec<Vec<f64>>,
    pub std_err: Vec<Vec<f64>>,
    pub decodable: bool,
    /// First iteration of the final zero-BER streak, when decodable.
    pub iterations_to_zero: Option<usize>,
}

impl DeTrace {
    pub fn len(&self) -> usize {
        self.ber.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ber.is_empty()
    }

    /// Worst BER over positions at every iteration.
    pub fn max_ber(&self) -> Vec<f64> {
        self.ber
            .iter()
            .map(|row| row.iter().cloned().fold(0.0, f64::max))
            .collect()
    }

    pub fn final_max_ber(&self) -> f64 {
        self.max_ber().last().copied().unwrap_or(f64::NAN)
    }

    /// CSV with `#` metadata lines followed by `iteration,position,ber` rows.
    pub fn write_csv<W: Write + ?Sized>(&self, out: &mut W, extra_meta: &[(String, String)]) -> io::Result<()> {
        writeln!(out, "# ensemble={}", self.ensemble)?;
        if let Some(s) = self.sigma {
            writeln!(out, "# sigma={s}")?;
        }
        writeln!(out, "# seed={}", self.config.seed)?;
        writeln!(out, "# N={}", self.config.population_size)?;
        writeln!(out, "# T={}", self.config.max_iterations)?;
        writeln!(out, "# clip={}", self.config.clip)?;
        writeln!(out, "# ber_samples={}", self.config.ber_samples)?;
        writeln!(out, "# zero_streak={}", self.config.zero_streak)?;
        writeln!(out, "# decodable={}", self.decodable)?;
        match self.iterations_to_zero {
            Some(t) => writeln!(out, "# iterations_to_zero={t}")?,
            None => writeln!(out, "# iterations_to_zero=none")?,
        }
        for (k, v) in extra_meta {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "iteration,position,ber")?;
        for (t, row) in self.ber.iter().enumerate() {
            for (pos, ber) in self.positions.iter().zip(row) {
                writeln!(out, "{},{},{}", t + 1, pos, ber)?;
            }
        }
        Ok(())
    }
}

/// Runs density evolution on `graph` until the zero-BER streak is reached or
/// the iteration cap is hit.
pub fn run_graph<C: VirtualChannel>(
    graph: DeGraph,
    channel: &C,
    cfg: &DeConfig,
    ensemble: String,
    sigma: Option<f64>,
) -> Result<DeTrace> {
    let mut state = DeState::new(graph, cfg)?;
    let mut rng = ber_rng(cfg.seed);
    let streak_needed = cfg.zero_streak.min(cfg.max_iterations);
    let mut trace = DeTrace {
        ensemble,
        sigma,
        config: cfg.clone(),
        positions: state.graph().bundle_labels().to_vec(),
        ber: Vec::new(),
        std_err: Vec::new(),
        decodable: false,
        iterations_to_zero: None,
    };
    let mut streak = 0;
    for _ in 0..cfg.max_iterations {
        state.iterate(channel);
        let est: Vec<BerEstimate> = state.estimate_ber(channel, cfg.ber_samples, &mut rng);
        let all_zero = est.iter().all(|e| e.ber == 0.0);
        trace.ber.push(est.iter().map(|e| e.ber).collect());
        trace.std_err.push(est.iter().map(|e| e.std_err).collect());
        streak = if all_zero { streak + 1 } else { 0 };
        if streak >= streak_needed {
            trace.decodable = true;
            trace.iterations_to_zero = Some(state.iteration() + 1 - streak);
            break;
        }
    }
    log::debug!(
        "DE {} sigma={:?}: {} iterations, decodable={}",
        trace.ensemble,
        sigma,
        trace.len(),
        trace.decodable
    );
    Ok(trace)
}

/// Density evolution for an ensemble over the two-way relay channel.
pub fn de_run(ensemble: &Ensemble, channel: &ChannelParams, cfg: &DeConfig) -> Result<DeTrace> {
    run_graph(
        DeGraph::from_ensemble(ensemble),
        channel,
        cfg,
        ensemble.label(),
        Some(channel.sigma()),
    )
}
