//! Regular Tanner graphs drawn from the configuration model.

use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::Bit;
use crate::error::{Error, Result};

/// Local swaps attempted per parallel edge before giving up on it.
const RESAMPLE_BUDGET: usize = 100;

/// A `(d_l, d_r)`-regular Tanner graph. Edge `e = v * d_l + s` is socket `s`
/// of variable `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    n: usize,
    m: usize,
    d_l: usize,
    d_r: usize,
    edge_check: Vec<u32>,
    /// Edge ids attached to each check, `d_r` per check.
    check_edges: Vec<u32>,
    parallel_edges: bool,
}

impl TannerGraph {
    /// Builds the graph from the check index of every edge.
    pub fn from_edge_checks(n: usize, d_l: usize, d_r: usize, edge_check: Vec<u32>) -> Result<Self> {
        if d_l == 0 || d_r == 0 || n == 0 || !(n * d_l).is_multiple_of(d_r) {
            return Err(Error::SizeMismatch {
                sockets: n * d_l,
                d_r,
            });
        }
        let m = n * d_l / d_r;
        if edge_check.len() != n * d_l {
            return Err(Error::InvalidConfig(format!(
                "expected {} edges, got {}",
                n * d_l,
                edge_check.len()
            )));
        }
        let mut fill = vec![0usize; m];
        let mut check_edges = vec![0u32; m * d_r];
        for (e, &a) in edge_check.iter().enumerate() {
            let a = a as usize;
            if a >= m || fill[a] == d_r {
                return Err(Error::InvalidConfig(format!("check {a} is out of range or over-full")));
            }
            check_edges[a * d_r + fill[a]] = e as u32;
            fill[a] += 1;
        }
        let mut g = Self {
            n,
            m,
            d_l,
            d_r,
            edge_check,
            check_edges,
            parallel_edges: false,
        };
        g.parallel_edges = (0..n).any(|v| g.has_parallel(v));
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d_l(&self) -> usize {
        self.d_l
    }

    pub fn d_r(&self) -> usize {
        self.d_r
    }

    pub fn edge_count(&self) -> usize {
        self.edge_check.len()
    }

    /// Set when some variable still has two sockets on one check.
    pub fn has_parallel_edges(&self) -> bool {
        self.parallel_edges
    }

    #[inline]
    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e] as usize
    }

    #[inline]
    pub fn edge_variable(&self, e: usize) -> usize {
        e / self.d_l
    }

    pub fn variable_checks(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edge_check[v * self.d_l..(v + 1) * self.d_l].iter().map(|&a| a as usize)
    }

    pub fn check_edges(&self, a: usize) -> &[u32] {
        &self.check_edges[a * self.d_r..(a + 1) * self.d_r]
    }

    pub fn check_variables(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.check_edges(a).iter().map(|&e| e as usize / self.d_l)
    }

    /// Variables in the support of row `a` of the parity-check matrix. A
    /// variable joined to the check by an even number of edges drops out.
    pub fn check_support(&self, a: usize) -> Vec<usize> {
        let mut vs: Vec<usize> = self.check_variables(a).collect();
        vs.sort_unstable();
        let mut out = Vec::with_capacity(vs.len());
        let mut i = 0;
        while i < vs.len() {
            let mut j = i;
            while j < vs.len() && vs[j] == vs[i] {
                j += 1;
            }
            if (j - i) % 2 == 1 {
                out.push(vs[i]);
            }
            i = j;
        }
        out
    }

    /// `H x` over GF(2), with multi-edges counted by multiplicity.
    pub fn syndrome(&self, x: &[Bit]) -> Vec<Bit> {
        assert_eq!(x.len(), self.n);
        (0..self.m)
            .map(|a| self.check_variables(a).fold(0, |acc, v| acc ^ x[v]))
            .collect()
    }

    pub fn is_codeword(&self, x: &[Bit]) -> bool {
        assert_eq!(x.len(), self.n);
        (0..self.m).all(|a| self.check_variables(a).fold(0, |acc, v| acc ^ x[v]) == 0)
    }

    /// Number of edges at each variable and at each check.
    pub fn degree_histogram(&self) -> (Vec<usize>, Vec<usize>) {
        let mut var = vec![0; self.n];
        let mut chk = vec![0; self.m];
        for (e, &a) in self.edge_check.iter().enumerate() {
            var[e / self.d_l] += 1;
            chk[a as usize] += 1;
        }
        (var, chk)
    }

    fn has_parallel(&self, v: usize) -> bool {
        let cs = &self.edge_check[v * self.d_l..(v + 1) * self.d_l];
        cs.iter().enumerate().any(|(i, a)| cs[..i].contains(a))
    }

    /// Writes `n m d_l d_r` on the first line, then one line per variable
    /// listing its checks in socket order.
    pub fn write_adjacency<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{} {} {} {}", self.n, self.m, self.d_l, self.d_r)?;
        let mut line = String::new();
        for v in 0..self.n {
            line.clear();
            for (i, a) in self.variable_checks(v).enumerate() {
                if i > 0 {
                    line.push(' ');
                }
                write!(line, "{a}").unwrap();
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_adjacency<R: BufRead>(input: R) -> Result<Self> {
        let bad = |msg: String| Error::InvalidConfig(format!("adjacency file: {msg}"));
        let mut lines = input
            .lines()
            .map(|l| l.map_err(|e| bad(e.to_string())))
            .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty() && !s.starts_with('#')));
        let header = lines.next().ok_or_else(|| bad("empty".into()))??;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("bad header token {t:?}"))))
            .collect::<Result<_>>()?;
        let [n, m, d_l, d_r] = nums[..] else {
            return Err(bad("header needs n m d_l d_r".into()));
        };
        let mut edge_check = Vec::with_capacity(n * d_l);
        for v in 0..n {
            let line = lines.next().ok_or_else(|| bad(format!("missing line for variable {v}")))??;
            let before = edge_check.len();
            for t in line.split_whitespace() {
                edge_check.push(t.parse::<u32>().map_err(|_| bad(format!("bad check index {t:?}")))?);
            }
            if edge_check.len() - before != d_l {
                return Err(bad(format!("variable {v} has {} checks", edge_check.len() - before)));
            }
        }
        let g = Self::from_edge_checks(n, d_l, d_r, edge_check)?;
        if g.m != m {
            return Err(bad(format!("header says {m} checks, degrees imply {}", g.m)));
        }
        Ok(g)
    }
}

/// Uniform matching of variable sockets to check sockets. A variable that
/// lands twice on one check has the extra socket swapped with a random other
/// edge; after the retry budget the parallel edge is kept and flagged.
pub fn sample_tanner_graph<R: Rng + ?Sized>(d_l: usize, d_r: usize, n: usize, rng: &mut R) -> Result<TannerGraph> {
    if d_l == 0 || d_r == 0 || n == 0 || !(n * d_l).is_multiple_of(d_r) {
        return Err(Error::SizeMismatch {
            sockets: n * d_l,
            d_r,
        });
    }
    let edges = n * d_l;
    let mut edge_check: Vec<u32> = (0..edges).map(|s| (s / d_r) as u32).collect();
    edge_check.shuffle(rng);
    let clashes = |ec: &[u32], e: usize| {
        let v = e / d_l;
        (v * d_l..(v + 1) * d_l).any(|f| f != e && ec[f] == ec[e])
    };
    for e in 0..edges {
        let mut tries = 0;
        while clashes(&edge_check, e) && tries < RESAMPLE_BUDGET {
            tries += 1;
            let f = rng.random_range(0..edges);
            if f / d_l == e / d_l {
                continue;
            }
            edge_check.swap(e, f);
            if clashes(&edge_check, e) || clashes(&edge_check, f) {
                edge_check.swap(e, f);
            }
        }
    }
    TannerGraph::from_edge_checks(n, d_l, d_r, edge_check)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    #[test]
    fn sizes() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
        let g = sample_tanner_graph(3, 6, 1000, &mut rng).unwrap();
        assert_eq!((g.n(), g.m(), g.edge_count()), (1000, 500, 3000));
        assert!(!g.has_parallel_edges());
        let (var, chk) = g.degree_histogram();
        assert!(var.iter().all(|&d| d == 3) && chk.iter().all(|&d| d == 6));

        let g = sample_tanner_graph(3, 6, 10, &mut rng).unwrap();
        assert_eq!(g.m(), 5);
        assert!(sample_tanner_graph(3, 6, 7, &mut rng).is_err());
    }

    #[test]
    fn adjacency_roundtrip() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
        let g = sample_tanner_graph(3, 9, 30, &mut rng).unwrap();
        let mut buf = Vec::new();
        g.write_adjacency(&mut buf).unwrap();
        let h = TannerGraph::read_adjacency(&buf[..]).unwrap();
        assert_eq!(g, h);
        assert!(TannerGraph::read_adjacency(&b"3 1 1 3\n0\n0\n"[..]).is_err());
    }

    #[test]
    fn double_edge_cancels_in_support() {
        // variable 0 hits check 0 twice
        let g = TannerGraph::from_edge_checks(4, 2, 4, vec![0, 0, 0, 1, 1, 0, 1, 1]).unwrap();
        assert!(g.has_parallel_edges());
        assert_eq!(g.check_support(0), vec![1, 2]);
        assert!(g.is_codeword(&[1, 0, 0, 0]));
    }
}
