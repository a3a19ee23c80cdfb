//! Simple undirected d-regular graphs, standard families and edge counting.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::rng::seeded;

/// Restart cap for the random pairing in [`random_regular`].
pub const MAX_PAIRING_RESTARTS: usize = 1000;

/// A simple undirected d-regular graph on vertices `0..n`.
///
/// Edges are stored as `(u, v)` with `u < v` in lexicographic order. The
/// constructor rejects self-loops, repeated pairs and irregular degree
/// sequences, so every value of this type is a valid base graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl RegularGraph {
    pub fn new(n: usize, d: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("graph must have at least one vertex".into()));
        }
        if d == 0 {
            return Err(Error::Validation("degree must be positive".into()));
        }
        let mut normalized = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::OutOfRange { vertex: a.max(b), n });
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop at vertex {a}")));
            }
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Validation(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        let mut neighbors = vec![Vec::with_capacity(d); n];
        for &(u, v) in &normalized {
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        if let Some((v, adj)) = neighbors.iter().enumerate().find(|(_, adj)| adj.len() != d) {
            return Err(Error::Validation(format!(
                "vertex {v} has degree {} but graph is declared {d}-regular",
                adj.len()
            )));
        }
        for adj in &mut neighbors {
            adj.sort_unstable();
        }
        Ok(Self {
            n,
            d,
            edges: normalized,
            neighbors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.neighbors[u].binary_search(&v).is_ok()
    }

    /// Connected components as a vertex -> component label map (labels in
    /// order of first appearance) plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = count;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &w in &self.neighbors[u] {
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_count(&self) -> usize {
        self.components().1
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.n];
        let mut stack = Vec::new();
        for start in 0..self.n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &w in &self.neighbors[u] {
                    if color[w] == u8::MAX {
                        color[w] = 1 - color[u];
                        stack.push(w);
                    } else if color[w] == color[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Neighbourhoods as bitmasks; only meaningful for `n <= 64`.
    pub(crate) fn neighbor_masks(&self) -> Vec<u64> {
        debug_assert!(self.n <= 64);
        self.neighbors
            .iter()
            .map(|adj| adj.iter().fold(0u64, |m, &v| m | (1u64 << v)))
            .collect()
    }
}

/// A set of vertex indices, kept sorted and deduplicated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    members: Vec<usize>,
}

impl VertexSubset {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Self {
        let set: BTreeSet<usize> = members.into_iter().collect();
        Self {
            members: set.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn all(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        Self {
            members: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn complement(&self, n: usize) -> Self {
        Self {
            members: (0..n).filter(|v| !self.contains(*v)).collect(),
        }
    }

    fn check_range(&self, n: usize) -> Result<()> {
        match self.members.last() {
            Some(&v) if v >= n => Err(Error::OutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

/// `K_m`: `n = m`, `d = m - 1`.
pub fn complete_graph(m: usize) -> Result<RegularGraph> {
    if m < 2 {
        return Err(Error::invalid(format!("complete graph needs m >= 2, got {m}")));
    }
    let edges = (0..m).flat_map(|u| (u + 1..m).map(move |v| (u, v)));
    RegularGraph::new(m, m - 1, edges)
}

/// `K_{m,m}` with sides `0..m` and `m..2m`.
pub fn complete_bipartite(m: usize) -> Result<RegularGraph> {
    if m < 1 {
        return Err(Error::invalid("complete bipartite graph needs m >= 1"));
    }
    let edges = (0..m).flat_map(|u| (m..2 * m).map(move |v| (u, v)));
    RegularGraph::new(2 * m, m, edges)
}

pub fn cycle_graph(n: usize) -> Result<RegularGraph> {
    if n < 3 {
        return Err(Error::invalid(format!("cycle needs n >= 3, got {n}")));
    }
    RegularGraph::new(n, 2, (0..n).map(|i| (i, (i + 1) % n)))
}

/// `m` vertex-disjoint copies of `g`; copy `c` occupies `c*n..(c+1)*n`.
pub fn disjoint_copies(g: &RegularGraph, m: usize) -> Result<RegularGraph> {
    if m < 1 {
        return Err(Error::invalid("need at least one copy"));
    }
    let n = g.n();
    let edges = (0..m).flat_map(|c| g.edges().iter().map(move |&(u, v)| (c * n + u, c * n + v)));
    RegularGraph::new(m * n, g.d(), edges)
}

/// Random simple d-regular graph from the configuration model.
///
/// Stubs are paired one random pair at a time; a pair that would create a
/// loop or a repeated edge is redrawn. If the remaining stubs admit no valid
/// pair the pairing restarts from scratch, up to [`MAX_PAIRING_RESTARTS`]
/// times. Output is a pure function of `(n, d, seed)`.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph> {
    if d == 0 || d >= n {
        return Err(Error::invalid(format!("need 0 < d < n, got n={n}, d={d}")));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(Error::invalid(format!("n*d must be even, got n={n}, d={d}")));
    }
    let mut rng = seeded(seed);
    for _ in 0..MAX_PAIRING_RESTARTS {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            return RegularGraph::new(n, d, edges);
        }
    }
    Err(Error::GenerationFailure {
        n,
        d,
        restarts: MAX_PAIRING_RESTARTS,
    })
}

fn try_pairing(n: usize, d: usize, rng: &mut impl Rng) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut adj: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    let mut edges = Vec::with_capacity(n * d / 2);
    let mut misses = 0usize;
    while !stubs.is_empty() {
        let m = stubs.len();
        let i = rng.gen_range(0..m);
        let mut j = rng.gen_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (u, v) = (stubs[i], stubs[j]);
        if u != v && !adj[u].contains(&v) {
            adj[u].push(v);
            adj[v].push(u);
            edges.push((u, v));
            stubs.swap_remove(i.max(j));
            stubs.swap_remove(i.min(j));
            misses = 0;
            continue;
        }
        misses += 1;
        if misses >= 64 {
            if !any_valid_pair(&stubs, &adj) {
                return None;
            }
            misses = 0;
        }
    }
    Some(edges)
}

fn any_valid_pair(stubs: &[usize], adj: &[Vec<usize>]) -> bool {
    let distinct: BTreeSet<usize> = stubs.iter().copied().collect();
    let distinct: Vec<usize> = distinct.into_iter().collect();
    distinct
        .iter()
        .enumerate()
        .any(|(a, &u)| distinct[a + 1..].iter().any(|&v| !adj[u].contains(&v)))
}

/// Number of ordered incidences `(u, v)` with `u` in `s`, `v` in `t` and
/// `{u, v}` an edge. An edge with both endpoints in `s ∩ t` counts twice.
pub fn edges_between(g: &RegularGraph, s: &VertexSubset, t: &VertexSubset) -> Result<usize> {
    s.check_range(g.n())?;
    t.check_range(g.n())?;
    let mut in_t = vec![false; g.n()];
    for &v in t.members() {
        in_t[v] = true;
    }
    Ok(s.members()
        .iter()
        .map(|&u| g.neighbors(u).iter().filter(|&&v| in_t[v]).count())
        .sum())
}

pub fn adjacency_matrix(g: &RegularGraph) -> RealMatrix {
    let mut a = RealMatrix::zeros(g.n());
    for &(u, v) in g.edges() {
        a.set(u, v, 1.0);
        a.set(v, u, 1.0);
    }
    a
}
