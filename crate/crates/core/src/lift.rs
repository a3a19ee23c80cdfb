//! k-lifts, shift k-lifts and signings of a base graph.
//!
//! Lift vertex `(x, i)` (base vertex `x`, sheet `i`) is encoded as
//! `x * k + i` everywhere in the crate. Permutations are stored only for the
//! canonical direction `u < v` of each base edge; the reverse direction is
//! the inverse permutation and is never stored.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::graph::{RegularGraph, VertexSubset};
use crate::matrix::RealMatrix;
use crate::rng::seeded;

/// Largest supported lift degree.
pub const MAX_LIFT_DEGREE: usize = 64;

fn check_degree(k: usize) -> Result<()> {
    if !(2..=MAX_LIFT_DEGREE).contains(&k) {
        return Err(Error::invalid(format!(
            "lift degree must be in 2..={MAX_LIFT_DEGREE}, got {k}"
        )));
    }
    Ok(())
}

/// One permutation of `0..k` per base edge, as the image sequence
/// `π_uv(0), …, π_uv(k-1)` for the edge `(u, v)` with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftAssignment {
    k: usize,
    perms: Vec<Vec<usize>>,
}

impl LiftAssignment {
    pub fn new(k: usize, perms: Vec<Vec<usize>>) -> Result<Self> {
        check_degree(k)?;
        for (e, p) in perms.iter().enumerate() {
            let mut seen = vec![false; k];
            if p.len() != k {
                return Err(Error::invalid(format!(
                    "edge {e}: permutation has {} images, expected {k}",
                    p.len()
                )));
            }
            for &x in p {
                if x >= k || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::invalid(format!(
                        "edge {e}: {p:?} is not a permutation of 0..{k}"
                    )));
                }
            }
        }
        Ok(Self { k, perms })
    }

    pub fn identity(k: usize, edges: usize) -> Result<Self> {
        Self::new(k, vec![(0..k).collect(); edges])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    /// `π_uv(i)` for base edge `edge` in its canonical direction.
    pub fn image(&self, edge: usize, i: usize) -> usize {
        self.perms[edge][i]
    }

    /// `π_vu(j) = π_uv^{-1}(j)`.
    pub fn inverse_image(&self, edge: usize, j: usize) -> usize {
        self.perms[edge].iter().position(|&x| x == j).expect("bijection")
    }
}

/// One cyclic shift amount per base edge (`π_uv(i) = (i + s) mod k` for
/// `u < v`; the reverse direction shifts by `-s mod k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftAssignment {
    k: usize,
    shifts: Vec<usize>,
}

impl ShiftAssignment {
    pub fn new(k: usize, shifts: Vec<usize>) -> Result<Self> {
        check_degree(k)?;
        if let Some((e, s)) = shifts.iter().enumerate().find(|(_, &s)| s >= k) {
            return Err(Error::invalid(format!("edge {e}: shift {s} not in 0..{k}")));
        }
        Ok(Self { k, shifts })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn shifts(&self) -> &[usize] {
        &self.shifts
    }

    pub fn len(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shifts.is_empty()
    }

    /// `Shift(u, v)` for the oriented pair; `reverse` selects `v -> u`.
    pub fn oriented(&self, edge: usize, reverse: bool) -> usize {
        let s = self.shifts[edge];
        if reverse {
            (self.k - s) % self.k
        } else {
            s
        }
    }
}

/// A ±1 label per base edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signing {
    signs: Vec<i8>,
}

impl Signing {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some((e, s)) = signs.iter().enumerate().find(|(_, &s)| s != 1 && s != -1) {
            return Err(Error::invalid(format!("edge {e}: sign {s} is not ±1")));
        }
        Ok(Self { signs })
    }

    pub fn all_positive(edges: usize) -> Self {
        Self { signs: vec![1; edges] }
    }

    /// Signing whose edge `e` is negative iff bit `e` of `mask` is set.
    pub fn from_mask(edges: usize, mask: u64) -> Self {
        Self {
            signs: (0..edges).map(|e| if mask >> e & 1 == 1 { -1 } else { 1 }).collect(),
        }
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }
}

/// A lift together with its base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedGraph {
    pub base: RegularGraph,
    pub k: usize,
    pub graph: RegularGraph,
}

impl LiftedGraph {
    /// Base vertex under lift vertex `v`.
    pub fn project(&self, v: usize) -> usize {
        v / self.k
    }
}

/// Independent uniform permutations (Fisher-Yates) for every base edge.
pub fn random_k_lift(g: &RegularGraph, k: usize, seed: u64) -> Result<LiftAssignment> {
    check_degree(k)?;
    let mut rng = seeded(seed);
    let perms = (0..g.edge_count())
        .map(|_| {
            let mut p: Vec<usize> = (0..k).collect();
            p.shuffle(&mut rng);
            p
        })
        .collect();
    LiftAssignment::new(k, perms)
}

/// Independent uniform shifts in `0..k` for every base edge.
pub fn random_shift_lift(g: &RegularGraph, k: usize, seed: u64) -> Result<ShiftAssignment> {
    check_degree(k)?;
    let mut rng = seeded(seed);
    // k <= 64, so the modulo bias of a 64-bit draw is below 2^-58.
    let shifts = (0..g.edge_count())
        .map(|_| (rng.next_u64() % k as u64) as usize)
        .collect();
    ShiftAssignment::new(k, shifts)
}

pub fn random_signing(g: &RegularGraph, seed: u64) -> Signing {
    let mut rng = seeded(seed);
    Signing {
        signs: (0..g.edge_count())
            .map(|_| if rng.gen::<bool>() { 1 } else { -1 })
            .collect(),
    }
}

/// `+1 ↦` identity, `-1 ↦` swap.
pub fn signing_to_assignment(s: &Signing) -> LiftAssignment {
    let perms = s
        .signs
        .iter()
        .map(|&x| if x == 1 { vec![0, 1] } else { vec![1, 0] })
        .collect();
    LiftAssignment { k: 2, perms }
}

/// Inverse of [`signing_to_assignment`]; requires `k = 2`.
pub fn assignment_to_signing(a: &LiftAssignment) -> Result<Signing> {
    if a.k != 2 {
        return Err(Error::invalid(format!("signings correspond to 2-lifts, got k={}", a.k)));
    }
    Ok(Signing {
        signs: a.perms.iter().map(|p| if p[0] == 0 { 1 } else { -1 }).collect(),
    })
}

/// Shift `s` becomes the permutation `i ↦ (i + s) mod k`.
pub fn shift_to_assignment(sa: &ShiftAssignment) -> LiftAssignment {
    let k = sa.k;
    let perms = sa
        .shifts
        .iter()
        .map(|&s| (0..k).map(|i| (i + s) % k).collect())
        .collect();
    LiftAssignment { k, perms }
}

/// Builds the lift: for base edge `(u, v)` and every sheet `i`, the lift has
/// the edge between `(u, i)` and `(v, π_uv(i))`.
pub fn build_lift(g: &RegularGraph, a: &LiftAssignment) -> Result<LiftedGraph> {
    if a.len() != g.edge_count() {
        return Err(Error::invalid(format!(
            "assignment covers {} edges, graph has {}",
            a.len(),
            g.edge_count()
        )));
    }
    let k = a.k;
    let edges = g
        .edges()
        .iter()
        .zip(&a.perms)
        .flat_map(|(&(u, v), p)| p.iter().enumerate().map(move |(i, &j)| (u * k + i, v * k + j)));
    let graph = RegularGraph::new(g.n() * k, g.d(), edges)?;
    Ok(LiftedGraph {
        base: g.clone(),
        k,
        graph,
    })
}

/// Adjacency matrix with `s(u, v)` on both `(u, v)` and `(v, u)`.
pub fn signed_adjacency(g: &RegularGraph, s: &Signing) -> Result<RealMatrix> {
    if s.len() != g.edge_count() {
        return Err(Error::invalid(format!(
            "signing covers {} edges, graph has {}",
            s.len(),
            g.edge_count()
        )));
    }
    let mut m = RealMatrix::zeros(g.n());
    for (&(u, v), &x) in g.edges().iter().zip(&s.signs) {
        m.set(u, v, x as f64);
        m.set(v, u, x as f64);
    }
    Ok(m)
}

/// `½ [[A + A_s, A - A_s], [A - A_s, A + A_s]]`, rows and columns indexed
/// sheet-major (`i * n + x`).
pub fn two_lift_block_matrix(a: &RealMatrix, a_s: &RealMatrix) -> Result<RealMatrix> {
    let n = a.n();
    if a_s.n() != n {
        return Err(Error::invalid(format!("dimension mismatch: {} vs {}", n, a_s.n())));
    }
    Ok(RealMatrix::from_fn(2 * n, |r, c| {
        let (x, y) = (r % n, c % n);
        let same_sheet = (r < n) == (c < n);
        let (p, q) = (a.get(x, y), a_s.get(x, y));
        if same_sheet {
            0.5 * (p + q)
        } else {
            0.5 * (p - q)
        }
    }))
}

/// Permutation taking the lift encoding `x * k + i` to the sheet-major
/// index `i * n + x` used by [`two_lift_block_matrix`].
pub fn sheet_major_order(n: usize, k: usize) -> Vec<usize> {
    (0..n * k).map(|v| (v % k) * n + v / k).collect()
}

/// The `k` lift vertices over base vertex `x`.
pub fn fiber(lg: &LiftedGraph, x: usize) -> Result<VertexSubset> {
    if x >= lg.base.n() {
        return Err(Error::OutOfRange {
            vertex: x,
            n: lg.base.n(),
        });
    }
    Ok(VertexSubset::new(x * lg.k..(x + 1) * lg.k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{adjacency_matrix, complete_graph, cycle_graph, disjoint_copies};

    #[test]
    fn assignment_validation() {
        assert!(LiftAssignment::new(3, vec![vec![0, 0, 1]]).is_err());
        assert!(LiftAssignment::new(3, vec![vec![0, 1]]).is_err());
        assert!(LiftAssignment::new(1, vec![vec![0]]).is_err());
        assert!(ShiftAssignment::new(3, vec![3]).is_err());
        assert!(Signing::new(vec![1, 0]).is_err());
    }

    #[test]
    fn random_assignments_are_seeded() {
        let g = complete_graph(5).unwrap();
        assert_eq!(random_k_lift(&g, 4, 11).unwrap(), random_k_lift(&g, 4, 11).unwrap());
        assert_eq!(
            random_shift_lift(&g, 4, 11).unwrap(),
            random_shift_lift(&g, 4, 11).unwrap()
        );
        assert!(random_k_lift(&g, 1, 0).is_err());
        assert!(random_shift_lift(&g, 1, 0).is_err());
    }

    #[test]
    fn signing_conversions() {
        let k2 = complete_graph(2).unwrap();
        let pos = signing_to_assignment(&Signing::all_positive(3));
        assert_eq!(pos, LiftAssignment::identity(2, 3).unwrap());
        let swap = signing_to_assignment(&Signing::new(vec![-1]).unwrap());
        assert_eq!(swap.perms(), &[vec![1, 0]]);
        let s = random_signing(&complete_graph(6).unwrap(), 3);
        assert_eq!(assignment_to_signing(&signing_to_assignment(&s)).unwrap(), s);
        let lg = build_lift(&k2, &swap).unwrap();
        assert_eq!(lg.graph.edges(), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn shift_conversion() {
        let a = shift_to_assignment(&ShiftAssignment::new(3, vec![0, 1]).unwrap());
        assert_eq!(a.perms(), &[vec![0, 1, 2], vec![1, 2, 0]]);
        let sa = ShiftAssignment::new(5, vec![2]).unwrap();
        let a = shift_to_assignment(&sa);
        for i in 0..5 {
            assert_eq!(a.inverse_image(0, a.image(0, i)), i);
            assert_eq!((a.image(0, i) + sa.oriented(0, true)) % 5, i);
        }
    }

    #[test]
    fn identity_lift_is_disjoint_copies() {
        let g = cycle_graph(5).unwrap();
        let lg = build_lift(&g, &LiftAssignment::identity(3, g.edge_count()).unwrap()).unwrap();
        assert_eq!(lg.graph.component_count(), 3);
        // Relabel sheet-major: identity lift becomes literally disjoint_copies.
        let order = sheet_major_order(5, 3);
        let relabeled = RegularGraph::new(15, 2, lg.graph.edges().iter().map(|&(u, v)| (order[u], order[v]))).unwrap();
        assert_eq!(relabeled, disjoint_copies(&g, 3).unwrap());
    }

    #[test]
    fn shifted_triangle_is_nine_cycle() {
        let c3 = cycle_graph(3).unwrap();
        let sa = ShiftAssignment::new(3, vec![1, 0, 0]).unwrap();
        let lg = build_lift(&c3, &shift_to_assignment(&sa)).unwrap();
        assert_eq!(lg.graph.n(), 9);
        assert!(lg.graph.is_connected());
        assert_eq!(lg.graph.d(), 2);
    }

    #[test]
    fn lift_projects_k_to_one() {
        let g = complete_graph(5).unwrap();
        let lg = build_lift(&g, &random_k_lift(&g, 4, 5).unwrap()).unwrap();
        assert_eq!(lg.graph.edge_count(), 4 * g.edge_count());
        let mut counts = std::collections::BTreeMap::new();
        for &(a, b) in lg.graph.edges() {
            let (x, y) = (lg.project(a), lg.project(b));
            *counts.entry((x.min(y), x.max(y))).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), g.edge_count());
        assert!(counts.values().all(|&c| c == 4));
        assert!(build_lift(&g, &LiftAssignment::identity(2, 3).unwrap()).is_err());
    }

    #[test]
    fn signed_adjacency_properties() {
        let g = complete_graph(4).unwrap();
        let a = adjacency_matrix(&g);
        assert_eq!(signed_adjacency(&g, &Signing::all_positive(6)).unwrap(), a);
        let s = random_signing(&g, 8);
        let a_s = signed_adjacency(&g, &s).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a_s.get(i, j).abs(), a.get(i, j));
            }
        }
        let k2 = signed_adjacency(&complete_graph(2).unwrap(), &Signing::new(vec![-1]).unwrap()).unwrap();
        assert_eq!(k2.as_slice(), &[0.0, -1.0, -1.0, 0.0]);
        assert!(signed_adjacency(&g, &Signing::all_positive(2)).is_err());
    }

    #[test]
    fn block_matrix_special_cases() {
        let a = adjacency_matrix(&complete_graph(4).unwrap());
        let same = two_lift_block_matrix(&a, &a).unwrap();
        let neg = two_lift_block_matrix(&a, &a.scaled(-1.0)).unwrap();
        for r in 0..8 {
            for c in 0..8 {
                let diag_block = (r < 4) == (c < 4);
                let base = a.get(r % 4, c % 4);
                assert_eq!(same.get(r, c), if diag_block { base } else { 0.0 });
                assert_eq!(neg.get(r, c), if diag_block { 0.0 } else { base });
            }
        }
        assert!(two_lift_block_matrix(&a, &RealMatrix::zeros(3)).is_err());
    }

    #[test]
    fn block_matrix_is_relabeled_lift() {
        let g = complete_graph(4).unwrap();
        let a = adjacency_matrix(&g);
        for seed in 0..20 {
            let s = random_signing(&g, seed);
            let lg = build_lift(&g, &signing_to_assignment(&s)).unwrap();
            let block = two_lift_block_matrix(&a, &signed_adjacency(&g, &s).unwrap()).unwrap();
            let relabeled = adjacency_matrix(&lg.graph).permuted(&sheet_major_order(4, 2));
            assert_eq!(relabeled, block);
        }
    }

    #[test]
    fn fibers_partition_lift() {
        let g = cycle_graph(4).unwrap();
        let lg = build_lift(&g, &random_k_lift(&g, 2, 1).unwrap()).unwrap();
        assert_eq!(fiber(&lg, 0).unwrap().members(), &[0, 1]);
        let mut all: Vec<usize> = (0..4).flat_map(|x| fiber(&lg, x).unwrap().members().to_vec()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..8).collect::<Vec<_>>());
        assert!(fiber(&lg, 4).is_err());
    }
}
