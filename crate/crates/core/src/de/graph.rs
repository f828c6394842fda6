use crate::ensemble::{Ensemble, RegularEnsemble, ScProtograph};

/// The message-passing skeleton density evolution runs on: one entry per
/// directed-edge class of a protograph, with the socket lists of both ends.
///
/// Parallel edges between a bundle and a check are not separate classes; they
/// appear as repeated entries in the socket lists and share one density.
#[derive(Debug, Clone, PartialEq)]
pub struct DeGraph {
    /// `(bundle label, check label)` per edge class.
    pub(crate) edges: Vec<(i64, i64)>,
    /// Edge classes seen by the `d_l` sockets of each bundle.
    pub(crate) var_sockets: Vec<Vec<usize>>,
    /// Edge classes seen by the sockets of each check.
    pub(crate) check_sockets: Vec<Vec<usize>>,
    pub(crate) bundle_of_edge: Vec<usize>,
    pub(crate) check_of_edge: Vec<usize>,
    pub(crate) bundle_labels: Vec<i64>,
    pub(crate) d_l: usize,
}

fn remove_one(list: &[usize], e: usize) -> Vec<usize> {
    let mut out = list.to_vec();
    let pos = out.iter().position(|&x| x == e).expect("edge is incident");
    out.remove(pos);
    out
}

impl DeGraph {
    /// `copies` disjoint copies of the uncoupled protograph: bundle `b` talks
    /// only to check `b` through `d_l` parallel edges per variable node.
    pub fn uncoupled_chain(e: &RegularEnsemble, copies: usize) -> Self {
        assert!(copies >= 1);
        let mut g = DeGraph {
            edges: Vec::new(),
            var_sockets: Vec::new(),
            check_sockets: Vec::new(),
            bundle_of_edge: Vec::new(),
            check_of_edge: Vec::new(),
            bundle_labels: Vec::new(),
            d_l: e.d_l,
        };
        for b in 0..copies {
            let label = b as i64 + 1;
            g.edges.push((label, label));
            g.bundle_of_edge.push(b);
            g.check_of_edge.push(b);
            g.var_sockets.push(vec![b; e.d_l]);
            g.check_sockets.push(vec![b; e.d_r]);
            g.bundle_labels.push(label);
        }
        g
    }

    pub fn regular(e: &RegularEnsemble) -> Self {
        Self::uncoupled_chain(e, 1)
    }

    pub fn coupled(p: &ScProtograph) -> Self {
        let k = p.k();
        let mut edges = Vec::new();
        let mut bundle_of_edge = Vec::new();
        let mut check_of_edge = Vec::new();
        let mut var_sockets = vec![Vec::new(); p.chain_length()];
        let mut check_sockets = vec![Vec::new(); p.check_count()];
        for (bi, i) in p.bundles().enumerate() {
            for a in p.bundle_neighbors(i) {
                let e = edges.len();
                edges.push((i, a));
                bundle_of_edge.push(bi);
                check_of_edge.push(p.check_index(a));
                var_sockets[bi].push(e);
            }
        }
        for a in p.check_labels() {
            let ci = p.check_index(a);
            for j in p.check_neighbors(a) {
                let bi = (j - 1) as usize;
                let e = *var_sockets[bi]
                    .iter()
                    .find(|&&e| edges[e].1 == a)
                    .expect("adjacency is symmetric");
                check_sockets[ci].extend(std::iter::repeat_n(e, k));
            }
        }
        DeGraph {
            edges,
            var_sockets,
            check_sockets,
            bundle_of_edge,
            check_of_edge,
            bundle_labels: p.bundles().collect(),
            d_l: p.d_l(),
        }
    }

    pub fn from_ensemble(e: &Ensemble) -> Self {
        match e {
            Ensemble::Regular(r) => Self::regular(r),
            Ensemble::Coupled(p) => Self::coupled(p),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn bundle_count(&self) -> usize {
        self.var_sockets.len()
    }

    pub fn bundle_labels(&self) -> &[i64] {
        &self.bundle_labels
    }

    pub fn variable_degree(&self) -> usize {
        self.d_l
    }

    pub fn check_degree_of_edge(&self, e: usize) -> usize {
        self.check_sockets[self.check_of_edge[e]].len()
    }

    /// Edge classes feeding the other sockets of the check of edge `e`.
    pub(crate) fn check_others(&self, e: usize) -> Vec<usize> {
        remove_one(&self.check_sockets[self.check_of_edge[e]], e)
    }

    /// Edge classes feeding the other sockets of the variable of edge `e`.
    pub(crate) fn var_others(&self, e: usize) -> Vec<usize> {
        remove_one(&self.var_sockets[self.bundle_of_edge[e]], e)
    }
}
