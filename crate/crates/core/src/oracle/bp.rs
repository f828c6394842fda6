//! Flooding sum-product decoding in the log domain.

use serde::{Deserialize, Serialize};

use super::tanner::TannerGraph;
use crate::channel::{Bit, ChannelParams};
use crate::de::{check_output_from_product, clip, tanh_half, DEFAULT_CLIP};

/// Outcome of one decode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpOutcome {
    pub estimate: Vec<Bit>,
    /// Iterations run, counting the initial channel decision as the first.
    pub iterations: usize,
    /// Stopped on a zero syndrome.
    pub converged: bool,
}

/// Decodes `y` with at most `max_iters` iterations, calling `observe` with
/// the hard decisions after each one. Iteration 1 decides on the channel
/// LLRs alone; each later iteration runs one check pass and one variable
/// pass. Decoding stops early as soon as the decisions form a codeword.
pub fn bp_decode_with(
    graph: &TannerGraph,
    y: &[f64],
    channel: &ChannelParams,
    max_iters: usize,
    bound: f64,
    mut observe: impl FnMut(usize, &[Bit]),
) -> BpOutcome {
    assert_eq!(y.len(), graph.n());
    let d_l = graph.d_l();
    let llr: Vec<f64> = y.iter().map(|&v| channel.llr(v)).collect();
    let mut v2c_tanh = vec![0.0; graph.edge_count()];
    let mut c2v = vec![0.0; graph.edge_count()];
    let mut hard: Vec<Bit> = vec![0; graph.n()];
    let mut prefix = vec![0.0; graph.d_r() + 1];
    let mut iterations = 0;
    let mut converged = false;
    for it in 1..=max_iters {
        iterations = it;
        if it > 1 {
            for a in 0..graph.m() {
                let edges = graph.check_edges(a);
                prefix[0] = 1.0;
                for (i, &e) in edges.iter().enumerate() {
                    prefix[i + 1] = prefix[i] * v2c_tanh[e as usize];
                }
                let mut suffix = 1.0;
                for (i, &e) in edges.iter().enumerate().rev() {
                    c2v[e as usize] = check_output_from_product(prefix[i] * suffix, bound);
                    suffix *= v2c_tanh[e as usize];
                }
            }
        }
        for v in 0..graph.n() {
            let incoming = &c2v[v * d_l..(v + 1) * d_l];
            let total = llr[v] + incoming.iter().sum::<f64>();
            hard[v] = (total < 0.0) as Bit;
            for s in 0..d_l {
                let m = incoming
                    .iter()
                    .enumerate()
                    .filter(|&(r, _)| r != s)
                    .fold(llr[v], |acc, (_, &c)| acc + c);
                v2c_tanh[v * d_l + s] = tanh_half(clip(m, bound));
            }
        }
        observe(it, &hard);
        if graph.is_codeword(&hard) {
            converged = true;
            break;
        }
    }
    BpOutcome {
        estimate: hard,
        iterations,
        converged,
    }
}

/// Per-iteration hard decisions and the final outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BpTrace {
    pub decisions: Vec<Vec<Bit>>,
    pub outcome: BpOutcome,
}

pub fn bp_decode(graph: &TannerGraph, y: &[f64], channel: &ChannelParams, max_iters: usize) -> BpTrace {
    let mut decisions = Vec::new();
    let outcome = bp_decode_with(graph, y, channel, max_iters, DEFAULT_CLIP, |_, d| decisions.push(d.to_vec()));
    BpTrace { decisions, outcome }
}
