//! Population-dynamics density evolution.
//!
//! Each directed edge class of the protograph carries two populations per
//! direction, one per value of the transmitted bit `z`, because the virtual
//! channel is asymmetric and the all-zero codeword cannot stand in for the
//! rest. One sweep first rebuilds every check-to-variable population from the
//! variable-to-check populations, then rebuilds every variable-to-check
//! population from the fresh check-to-variable ones.

use rand::{Rng, RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::DeGraph;
use super::population::{check_output_from_product, clip, tanh_half, Direction, Population, DEFAULT_CLIP};
use crate::channel::{Bit, VirtualChannel};
use crate::error::{Error, Result};

/// Slots updated from one random stream. Fixed so that results do not depend
/// on how work is split across threads.
const CHUNK: usize = 2048;

const TAG_CHECK: u64 = 0x636b;
const TAG_VARIABLE: u64 = 0x7661;
const TAG_BER: u64 = 0x6265;

/// Density-evolution parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    /// Samples per population (`N`).
    pub population_size: usize,
    /// Iteration cap (`T`).
    pub max_iterations: usize,
    pub seed: u64,
    /// Message clip bound in nats.
    pub clip: f64,
    /// Full-message draws per position and per bit value when estimating BER.
    pub ber_samples: usize,
    /// Consecutive all-zero BER iterations required to declare success.
    pub zero_streak: usize,
    /// Use the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population_size: 10_000,
            max_iterations: 1000,
            seed: 0x5eed_2017,
            clip: DEFAULT_CLIP,
            ber_samples: 10_000,
            zero_streak: 10,
            parallel: true,
        }
    }
}

impl DeConfig {
    /// Desk-scale configuration: `N = 10^4`, `T = 1000`.
    pub fn desk() -> Self {
        Self::default()
    }

    /// The large configuration: `N = 10^5`, `T = 2000`.
    pub fn paper_fidelity() -> Self {
        Self {
            population_size: 100_000,
            max_iterations: 2000,
            ber_samples: 100_000,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 100 {
            return Err(Error::InvalidConfig(format!(
                "population size must be at least 100, got {}",
                self.population_size
            )));
        }
        if self.population_size > u32::MAX as usize {
            return Err(Error::InvalidConfig("population size exceeds 2^32".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max iterations must be at least 1".into()));
        }
        if !(self.clip.is_finite() && self.clip > 0.0) {
            return Err(Error::InvalidConfig(format!("clip bound must be positive, got {}", self.clip)));
        }
        if self.ber_samples < 1 {
            return Err(Error::InvalidConfig("ber_samples must be at least 1".into()));
        }
        if self.zero_streak < 1 {
            return Err(Error::InvalidConfig("zero_streak must be at least 1".into()));
        }
        Ok(())
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent stream for one (purpose, iteration, population, chunk).
pub(crate) fn stream(seed: u64, tag: u64, iteration: usize, population: usize, chunk: usize) -> Xoshiro256PlusPlus {
    let id = splitmix(splitmix(splitmix(splitmix(seed) ^ tag) ^ iteration as u64) ^ population as u64);
    Xoshiro256PlusPlus::seed_from_u64(splitmix(id ^ chunk as u64))
}

/// Draws the bits of the `others` non-target sockets of a check whose target
/// socket carries `z`: all but the last uniformly, the last fixed by even
/// parity. Bit `s` of the result belongs to socket `s`.
#[inline]
pub fn draw_socket_bits<R: RngCore + ?Sized>(z: Bit, others: usize, rng: &mut R) -> u64 {
    debug_assert!((1..=64).contains(&others));
    let free = others - 1;
    let mut mask = if free == 0 {
        0
    } else {
        rng.next_u64() & (u64::MAX >> (64 - free))
    };
    let parity = (mask.count_ones() as u64 + z as u64) & 1;
    mask |= parity << free;
    mask
}

#[inline]
fn random_index<R: Rng + ?Sized>(rng: &mut R, n: u32) -> usize {
    rng.random_range(0..n) as usize
}

/// BER estimate at one position with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerEstimate {
    pub ber: f64,
    pub std_err: f64,
}

/// All populations of a density-evolution run plus the iteration counter.
#[derive(Debug, Clone)]
pub struct DeState {
    graph: DeGraph,
    cfg: DeConfig,
    /// Indexed `2 * edge + z`.
    v2c: Vec<Population>,
    c2v: Vec<Population>,
    /// `tanh(m/2)` of every variable-to-check sample, kept in step with `v2c`.
    v2c_tanh: Vec<Vec<f64>>,
    check_src: Vec<Vec<usize>>,
    var_src: Vec<Vec<usize>>,
    iteration: usize,
}

impl DeState {
    /// All populations start at zero.
    pub fn new(graph: DeGraph, cfg: &DeConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.population_size;
        let mut v2c = Vec::with_capacity(2 * graph.edge_count());
        let mut c2v = Vec::with_capacity(2 * graph.edge_count());
        for &(bundle, check) in &graph.edges {
            for z in 0..2 {
                v2c.push(Population::zeros(Direction::VariableToCheck, bundle, check, z, n));
                c2v.push(Population::zeros(Direction::CheckToVariable, bundle, check, z, n));
            }
        }
        let check_src = (0..graph.edge_count()).map(|e| graph.check_others(e)).collect();
        let var_src = (0..graph.edge_count()).map(|e| graph.var_others(e)).collect();
        Ok(Self {
            v2c_tanh: vec![vec![0.0; n]; 2 * graph.edge_count()],
            graph,
            cfg: cfg.clone(),
            v2c,
            c2v,
            check_src,
            var_src,
            iteration: 0,
        })
    }

    pub fn graph(&self) -> &DeGraph {
        &self.graph
    }

    pub fn config(&self) -> &DeConfig {
        &self.cfg
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn population_count(&self) -> usize {
        self.v2c.len() + self.c2v.len()
    }

    pub fn variable_to_check(&self) -> &[Population] {
        &self.v2c
    }

    pub fn check_to_variable(&self) -> &[Population] {
        &self.c2v
    }

    /// Overwrites the check-to-variable populations, e.g. to probe the BER
    /// estimator on a prescribed state.
    pub fn set_check_to_variable(&mut self, f: impl Fn(&Population) -> Vec<f64>) {
        for p in &mut self.c2v {
            let s = f(p);
            assert_eq!(s.len(), p.samples.len());
            p.samples = s;
        }
    }

    /// One synchronous sweep: checks first, then variables.
    ///
    /// A check update reads only variable-to-check populations and a variable
    /// update reads only check-to-variable populations, so each half-sweep
    /// sees exactly the buffers produced by the previous one.
    pub fn iterate<C: VirtualChannel>(&mut self, channel: &C) {
        self.iteration += 1;
        self.check_half_sweep();
        self.variable_half_sweep(channel);
    }

    fn check_half_sweep(&mut self) {
        let n = self.cfg.population_size as u32;
        let bound = self.cfg.clip;
        let seed = self.cfg.seed;
        let it = self.iteration;
        let tanh = &self.v2c_tanh;
        let check_src = &self.check_src;
        let update = |p: usize, c: usize, chunk: &mut [f64]| {
            let e = p / 2;
            let z = (p % 2) as Bit;
            let others = &check_src[e];
            let mut rng = stream(seed, TAG_CHECK, it, p, c);
            for slot in chunk.iter_mut() {
                let mask = draw_socket_bits(z, others.len(), &mut rng);
                let mut t = 1.0;
                for (s, &src) in others.iter().enumerate() {
                    let b = ((mask >> s) & 1) as usize;
                    t *= tanh[2 * src + b][random_index(&mut rng, n)];
                }
                *slot = check_output_from_product(t, bound);
            }
        };
        if self.cfg.parallel {
            self.c2v.par_iter_mut().enumerate().for_each(|(p, pop)| {
                pop.samples
                    .par_chunks_mut(CHUNK)
                    .enumerate()
                    .for_each(|(c, chunk)| update(p, c, chunk));
            });
        } else {
            for (p, pop) in self.c2v.iter_mut().enumerate() {
                for (c, chunk) in pop.samples.chunks_mut(CHUNK).enumerate() {
                    update(p, c, chunk);
                }
            }
        }
    }

    fn variable_half_sweep<C: VirtualChannel>(&mut self, channel: &C) {
        let n = self.cfg.population_size as u32;
        let bound = self.cfg.clip;
        let seed = self.cfg.seed;
        let it = self.iteration;
        let c2v = &self.c2v;
        let var_src = &self.var_src;
        let update = |p: usize, c: usize, chunk: &mut [f64], tchunk: &mut [f64]| {
            let e = p / 2;
            let z = (p % 2) as Bit;
            let others = &var_src[e];
            let mut rng = stream(seed, TAG_VARIABLE, it, p, c);
            for (slot, tslot) in chunk.iter_mut().zip(tchunk.iter_mut()) {
                let y = channel.sample_output(z, &mut rng);
                let mut m = channel.llr(y);
                for &src in others {
                    m += c2v[2 * src + z as usize].samples[random_index(&mut rng, n)];
                }
                let m = clip(m, bound);
                *slot = m;
                *tslot = tanh_half(m);
            }
        };
        if self.cfg.parallel {
            self.v2c
                .par_iter_mut()
                .zip(self.v2c_tanh.par_iter_mut())
                .enumerate()
                .for_each(|(p, (pop, th))| {
                    pop.samples
                        .par_chunks_mut(CHUNK)
                        .zip(th.par_chunks_mut(CHUNK))
                        .enumerate()
                        .for_each(|(c, (chunk, tchunk))| update(p, c, chunk, tchunk));
                });
        } else {
            for (p, (pop, th)) in self.v2c.iter_mut().zip(self.v2c_tanh.iter_mut()).enumerate() {
                for (c, (chunk, tchunk)) in pop
                    .samples
                    .chunks_mut(CHUNK)
                    .zip(th.chunks_mut(CHUNK))
                    .enumerate()
                {
                    update(p, c, chunk, tchunk);
                }
            }
        }
    }

    /// Per-bundle BER of the full marginal `lambda(y) + sum of all d_l incoming
    /// check messages`, averaged over both values of the transmitted bit. A
    /// marginal of exactly zero counts as half an error.
    pub fn estimate_ber<C: VirtualChannel, R: Rng + ?Sized>(
        &self,
        channel: &C,
        samples: usize,
        rng: &mut R,
    ) -> Vec<BerEstimate> {
        let base = rng.next_u64();
        let n = self.cfg.population_size as u32;
        let c2v = &self.c2v;
        let estimate = |b: usize| {
            let sockets = &self.graph.var_sockets[b];
            let mut rate = [0.0; 2];
            for z in 0..2u8 {
                let mut rng = stream(base, TAG_BER, self.iteration, b, z as usize);
                let mut errors = 0.0;
                for _ in 0..samples {
                    let y = channel.sample_output(z, &mut rng);
                    let mut m = channel.llr(y);
                    for &src in sockets {
                        m += c2v[2 * src + z as usize].samples[random_index(&mut rng, n)];
                    }
                    if m == 0.0 {
                        errors += 0.5;
                    } else if (z == 0) == (m < 0.0) {
                        errors += 1.0;
                    }
                }
                rate[z as usize] = errors / samples as f64;
            }
            let var = (rate[0] * (1.0 - rate[0]) + rate[1] * (1.0 - rate[1])) / (4.0 * samples as f64);
            BerEstimate {
                ber: 0.5 * (rate[0] + rate[1]),
                std_err: var.sqrt(),
            }
        };
        let bundles = self.graph.bundle_count();
        if self.cfg.parallel {
            (0..bundles).into_par_iter().map(estimate).collect()
        } else {
            (0..bundles).map(estimate).collect()
        }
    }
}

/// RNG used by the run driver for BER estimation, independent of the
/// population streams.
pub(crate) fn ber_rng(seed: u64) -> Xoshiro256PlusPlus {
    stream(seed, TAG_BER, usize::MAX, usize::MAX, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::ensemble::{RegularEnsemble, ScProtograph};
    use proptest::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn small_cfg() -> DeConfig {
        DeConfig {
            population_size: 1000,
            ber_samples: 1000,
            ..DeConfig::default()
        }
    }

    #[test]
    fn init_counts() {
        let g = DeGraph::regular(&RegularEnsemble::new(3, 6).unwrap());
        let s = DeState::new(g, &small_cfg()).unwrap();
        assert_eq!(s.population_count(), 4);
        assert!(s.variable_to_check().iter().all(|p| p.len() == 1000 && p.samples.iter().all(|&x| x == 0.0)));
        assert_eq!(s.iteration(), 0);

        let g = DeGraph::coupled(&ScProtograph::new(3, 6, 5).unwrap());
        let s = DeState::new(g, &small_cfg()).unwrap();
        assert_eq!(s.population_count(), 4 * 5 * 3);
    }

    #[test]
    fn rejects_bad_config() {
        let g = DeGraph::regular(&RegularEnsemble::new(3, 6).unwrap());
        let cfg = DeConfig {
            population_size: 10,
            ..DeConfig::default()
        };
        assert!(DeState::new(g.clone(), &cfg).is_err());
        let cfg = DeConfig {
            max_iterations: 0,
            ..DeConfig::default()
        };
        assert!(DeState::new(g.clone(), &cfg).is_err());
        let cfg = DeConfig {
            clip: 0.0,
            ..DeConfig::default()
        };
        assert!(DeState::new(g, &cfg).is_err());
    }

    #[test]
    fn first_iteration_from_zero() {
        let ch = ChannelParams::new(0.8).unwrap();
        let g = DeGraph::regular(&RegularEnsemble::new(3, 6).unwrap());
        let mut s = DeState::new(g, &small_cfg()).unwrap();
        s.iterate(&ch);
        assert!(s.check_to_variable().iter().all(|p| p.samples.iter().all(|&x| x == 0.0)));
        // z=1 outputs sit at y ~ 0, whose LLR is close to its minimum -2/sigma^2
        let floor = ch.llr(0.0);
        for p in s.variable_to_check() {
            assert!(p.samples.iter().all(|&m| m >= floor - 1e-12));
        }
        let mean1: f64 = s.variable_to_check()[1].samples.iter().sum::<f64>() / 1000.0;
        let mean0: f64 = s.variable_to_check()[0].samples.iter().sum::<f64>() / 1000.0;
        assert!(mean0 > 0.0 && mean1 < 0.0);
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let ch = ChannelParams::new(0.75).unwrap();
        let p = ScProtograph::new(3, 6, 4).unwrap();
        let cfg = DeConfig {
            population_size: 5000,
            ..DeConfig::default()
        };
        let mut a = DeState::new(DeGraph::coupled(&p), &cfg).unwrap();
        let mut b = DeState::new(
            DeGraph::coupled(&p),
            &DeConfig {
                parallel: false,
                ..cfg.clone()
            },
        )
        .unwrap();
        for _ in 0..3 {
            a.iterate(&ch);
            b.iterate(&ch);
        }
        assert_eq!(a.variable_to_check(), b.variable_to_check());
        assert_eq!(a.check_to_variable(), b.check_to_variable());
    }

    #[test]
    fn samples_stay_clipped_and_sized() {
        let ch = ChannelParams::new(0.3).unwrap();
        let cfg = DeConfig {
            clip: 20.0,
            ..small_cfg()
        };
        let g = DeGraph::coupled(&ScProtograph::new(3, 6, 3).unwrap());
        let mut s = DeState::new(g, &cfg).unwrap();
        let count = s.population_count();
        for _ in 0..15 {
            s.iterate(&ch);
            assert_eq!(s.population_count(), count);
            for p in s.variable_to_check().iter().chain(s.check_to_variable()) {
                assert_eq!(p.len(), 1000);
                assert!(p.samples.iter().all(|m| m.is_finite() && m.abs() <= 20.0));
            }
        }
    }

    #[test]
    fn polarized_state_has_zero_ber() {
        let ch = ChannelParams::new(0.3).unwrap();
        let cfg = small_cfg();
        let g = DeGraph::regular(&RegularEnsemble::new(3, 6).unwrap());
        let mut s = DeState::new(g, &cfg).unwrap();
        s.iterate(&ch);
        s.set_check_to_variable(|p| vec![if p.z == 0 { cfg.clip } else { -cfg.clip }; p.len()]);
        let ber = s.estimate_ber(&ch, 10_000, &mut ber_rng(1));
        assert_eq!(ber[0].ber, 0.0);
    }

    proptest! {
        #[test]
        fn socket_bits_have_even_parity(z in 0u8..2, others in 1usize..=20, seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..50 {
                let mask = draw_socket_bits(z, others, &mut rng);
                prop_assert_eq!(mask >> others, 0);
                prop_assert_eq!((mask.count_ones() + z as u32) % 2, 0);
            }
        }
    }

    #[test]
    fn socket_bits_uniform_over_constrained_tuples() {
        // 3 other sockets, z=1: the 4 odd-weight tuples should be equally likely
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut counts = [0usize; 8];
        let n = 80_000;
        for _ in 0..n {
            counts[draw_socket_bits(1, 3, &mut rng) as usize] += 1;
        }
        for (m, &c) in counts.iter().enumerate() {
            if (m as u32).count_ones() % 2 == 1 {
                assert!((c as f64 / n as f64 - 0.25).abs() < 0.01);
            } else {
                assert_eq!(c, 0);
            }
        }
    }
}
