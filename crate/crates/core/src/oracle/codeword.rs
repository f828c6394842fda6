//! Uniform sampling from the null space of a sparse parity-check matrix.
//!
//! Elimination runs in two stages. A peeling pass solves one column per
//! check whenever a check has a single unresolved column; when it stalls,
//! all but one column of a lowest-degree check are set aside as inactive
//! unknowns. Every peeled column is then a linear form in the inactive ones,
//! and the checks never used for peeling give a small dense system in the
//! inactive unknowns, which is solved by ordinary elimination.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::gf2::{dot_words, BitMatrix};
use super::tanner::TannerGraph;
use crate::channel::{bipolar, Bit, ChannelParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    Active,
    Solved,
    Inactive(usize),
}

/// Precomputed elimination of one graph, reusable for any number of draws.
#[derive(Debug, Clone)]
pub struct CodeSampler {
    n: usize,
    /// `(column, supporting columns)` in solve order; each column is the XOR
    /// of its supporting columns.
    peel: Vec<(usize, Vec<usize>)>,
    /// Columns treated as unknowns of the dense system.
    inactive: Vec<usize>,
    /// Dense system over the inactive columns, in reduced row echelon form.
    reduced: BitMatrix,
    pivots: Vec<usize>,
    free: Vec<usize>,
}

impl CodeSampler {
    pub fn new(graph: &TannerGraph) -> Self {
        let n = graph.n();
        let m = graph.m();
        let rows: Vec<Vec<usize>> = (0..m).map(|a| graph.check_support(a)).collect();
        let mut col_rows = vec![Vec::new(); n];
        for (a, r) in rows.iter().enumerate() {
            for &v in r {
                col_rows[v].push(a);
            }
        }
        let mut state = vec![Col::Active; n];
        let mut deg: Vec<usize> = rows.iter().map(Vec::len).collect();
        let mut used = vec![false; m];
        let max_deg = deg.iter().copied().max().unwrap_or(0);
        // bucket queue with stale entries skipped on pop
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_deg + 1];
        for a in 0..m {
            buckets[deg[a]].push(a);
        }
        let mut inactive = Vec::new();
        let mut order = Vec::new();
        let mut unused_rows: Vec<usize> = col_rows.iter().map(Vec::len).collect();

        let retire = |c: usize, deg: &mut Vec<usize>, buckets: &mut Vec<Vec<usize>>, used: &[bool]| {
            for &a in &col_rows[c] {
                if !used[a] {
                    deg[a] -= 1;
                    buckets[deg[a]].push(a);
                }
            }
        };

        loop {
            let mut found = None;
            'scan: for (d, bucket) in buckets.iter_mut().enumerate().skip(1) {
                while let Some(a) = bucket.pop() {
                    if !used[a] && deg[a] == d {
                        found = Some((a, d));
                        break 'scan;
                    }
                }
            }
            let Some((a, d)) = found else { break };
            let mut act: Vec<usize> = rows[a].iter().copied().filter(|&v| state[v] == Col::Active).collect();
            debug_assert_eq!(act.len(), d);
            if d > 1 {
                // set aside the columns touching the most open checks
                act.sort_by_key(|&v| std::cmp::Reverse(unused_rows[v]));
                for &v in &act[..d - 1] {
                    state[v] = Col::Inactive(inactive.len());
                    inactive.push(v);
                    retire(v, &mut deg, &mut buckets, &used);
                }
            }
            let c = act[d - 1];
            used[a] = true;
            for &v in &rows[a] {
                unused_rows[v] -= 1;
            }
            state[c] = Col::Solved;
            order.push((c, a));
            retire(c, &mut deg, &mut buckets, &used);
        }
        for (v, s) in state.iter_mut().enumerate() {
            if *s == Col::Active {
                *s = Col::Inactive(inactive.len());
                inactive.push(v);
            }
        }

        let peel: Vec<(usize, Vec<usize>)> = order
            .iter()
            .map(|&(c, a)| (c, rows[a].iter().copied().filter(|&v| v != c).collect()))
            .collect();
        let leftover: Vec<Vec<usize>> = (0..m).filter(|&a| !used[a]).map(|a| rows[a].clone()).collect();

        // column j of the dense system is the leftover syndrome of the
        // propagated unit vector on inactive column j, 64 columns per pass
        let k = inactive.len();
        let mut dense = BitMatrix::zeros(leftover.len(), k);
        let mut lanes = vec![0u64; n];
        for base in (0..k).step_by(64) {
            lanes.iter_mut().for_each(|w| *w = 0);
            for (i, &v) in inactive[base..k.min(base + 64)].iter().enumerate() {
                lanes[v] = 1 << i;
            }
            propagate(&peel, &mut lanes);
            for (r, row) in leftover.iter().enumerate() {
                let word = row.iter().fold(0u64, |acc, &v| acc ^ lanes[v]);
                dense.or_word(r, base / 64, word);
            }
        }
        let pivots = dense.rref();
        let mut is_pivot = vec![false; k];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free = (0..k).filter(|&j| !is_pivot[j]).collect();
        Self {
            n,
            peel,
            inactive,
            reduced: dense,
            pivots,
            free,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Code dimension, `n - rank(H)`.
    pub fn dimension(&self) -> usize {
        self.free.len()
    }

    pub fn rank(&self) -> usize {
        self.n - self.dimension()
    }

    /// Number of unknowns handed to dense elimination.
    pub fn inactive_count(&self) -> usize {
        self.inactive.len()
    }

    /// The codeword whose free coordinates are `coeffs`.
    pub fn codeword_from(&self, coeffs: &[Bit]) -> Vec<Bit> {
        assert_eq!(coeffs.len(), self.free.len());
        let k = self.inactive.len();
        let mut packed = BitMatrix::zeros(1, k);
        for (&f, &b) in self.free.iter().zip(coeffs) {
            packed.set(0, f, b & 1 == 1);
        }
        let mut s: Vec<Bit> = (0..k).map(|j| packed.get(0, j) as Bit).collect();
        for (i, &p) in self.pivots.iter().enumerate() {
            s[p] = dot_words(self.reduced.row_words(i), packed.row_words(0)) as Bit;
        }
        let mut x = vec![0u8; self.n];
        for (&v, &b) in self.inactive.iter().zip(&s) {
            x[v] = b;
        }
        propagate(&self.peel, &mut x);
        x
    }

    /// A uniformly random codeword.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<Bit> {
        let mut coeffs = vec![0u8; self.free.len()];
        let mut word = 0u64;
        for (i, c) in coeffs.iter_mut().enumerate() {
            if i % 64 == 0 {
                word = rng.next_u64();
            }
            *c = ((word >> (i % 64)) & 1) as Bit;
        }
        self.codeword_from(&coeffs)
    }

    /// One basis vector per free coordinate.
    pub fn basis(&self) -> Vec<Vec<Bit>> {
        (0..self.dimension())
            .map(|i| {
                let mut c = vec![0u8; self.dimension()];
                c[i] = 1;
                self.codeword_from(&c)
            })
            .collect()
    }
}

fn propagate<T: Copy + std::ops::BitXor<Output = T> + Default>(peel: &[(usize, Vec<usize>)], x: &mut [T]) {
    for (c, support) in peel {
        x[*c] = support.iter().fold(T::default(), |acc, &v| acc ^ x[v]);
    }
}

/// The two terminals' codewords and their XOR.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodewordPair {
    pub x_a: Vec<Bit>,
    pub x_b: Vec<Bit>,
    pub z: Vec<Bit>,
}

impl CodewordPair {
    pub fn new(x_a: Vec<Bit>, x_b: Vec<Bit>) -> Self {
        assert_eq!(x_a.len(), x_b.len());
        let z = x_a.iter().zip(&x_b).map(|(a, b)| a ^ b).collect();
        Self { x_a, x_b, z }
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.x_b.clone(), self.x_a.clone())
    }
}

/// Two independent uniform codewords.
pub fn codeword_sampler<R: RngCore + ?Sized>(sampler: &CodeSampler, rng: &mut R) -> CodewordPair {
    let x_a = sampler.sample(rng);
    let x_b = sampler.sample(rng);
    CodewordPair::new(x_a, x_b)
}

/// Relay observation `mu(x_A) + mu(x_B) + w`.
pub fn transmit<R: Rng + ?Sized>(pair: &CodewordPair, channel: &ChannelParams, rng: &mut R) -> Vec<f64> {
    let noise = rand_distr::Normal::new(0.0, channel.sigma()).expect("sigma validated");
    pair.x_a
        .iter()
        .zip(&pair.x_b)
        .map(|(&a, &b)| bipolar(a) + bipolar(b) + rng.sample(noise))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::tanner::sample_tanner_graph;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn codewords_satisfy_checks() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(3);
        for &(dl, dr, n) in &[(3, 6, 10), (3, 6, 1000), (3, 9, 900), (4, 8, 200)] {
            let g = sample_tanner_graph(dl, dr, n, &mut rng).unwrap();
            let s = CodeSampler::new(&g);
            assert!(s.dimension() >= n - g.m());
            for _ in 0..5 {
                let p = codeword_sampler(&s, &mut rng);
                assert!(g.is_codeword(&p.x_a) && g.is_codeword(&p.x_b) && g.is_codeword(&p.z));
            }
            for b in s.basis() {
                assert!(g.is_codeword(&b));
            }
        }
    }

    #[test]
    fn dimension_matches_dense_rank() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(4);
        for n in [10, 20, 60, 300] {
            let g = sample_tanner_graph(3, 6, n, &mut rng).unwrap();
            let rows: Vec<Vec<Bit>> = (0..g.m())
                .map(|a| {
                    let mut r = vec![0u8; n];
                    for v in g.check_support(a) {
                        r[v] = 1;
                    }
                    r
                })
                .collect();
            let h = BitMatrix::from_rows(&rows);
            assert_eq!(CodeSampler::new(&g).rank(), h.rank(), "n={n}");
        }
    }

    #[test]
    fn swapping_terminals_keeps_observation() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let g = sample_tanner_graph(3, 6, 100, &mut rng).unwrap();
        let p = codeword_sampler(&CodeSampler::new(&g), &mut rng);
        let ch = ChannelParams::new(0.7).unwrap();
        let y1 = transmit(&p, &ch, &mut Xoshiro256PlusPlus::seed_from_u64(9));
        let y2 = transmit(&p.swapped(), &ch, &mut Xoshiro256PlusPlus::seed_from_u64(9));
        assert_eq!(y1, y2);
        assert_eq!(p.z, p.swapped().z);
    }
}
