//! Exhaustive signing search and greedy iterated lifts.

use serde::Serialize;

use super::trials::base_lambda;
use crate::error::{Error, Result};
use crate::graph::{adjacency_matrix, RegularGraph};
use crate::lift::{build_lift, random_k_lift, signing_to_assignment, LiftAssignment, Signing};
use crate::matrix::RealMatrix;
use crate::par::{map_indexed, Execution};
use crate::rng::derive_seed;
use crate::spectral::{eig_symmetric, split_old_new, DEFAULT_TOL, MATCH_WINDOW};

/// Most edges for which all `2^|E|` signings are enumerated.
pub const MAX_SEARCH_EDGES: usize = 24;
/// Signings per parallel work unit.
const SEARCH_CHUNK: u64 = 1 << 10;

#[derive(Clone, Debug, Serialize)]
pub struct SigningSearchReport {
    pub edges: usize,
    pub signings_checked: u64,
    pub min_radius: f64,
    /// Bit `e` set means edge `e` is negative.
    pub best_mask: u64,
    pub best_signing: Vec<i8>,
    /// `2√(d-1)`.
    pub ramanujan_bound: f64,
    pub within_bound: bool,
}

fn signed_from_mask(g: &RegularGraph, mask: u64, m: &mut RealMatrix) {
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let s = if mask >> e & 1 == 1 { -1.0 } else { 1.0 };
        m.set(u, v, s);
        m.set(v, u, s);
    }
}

/// `‖A_s‖` minimized over every signing; ties go to the smaller mask.
pub fn exhaustive_signing_search(g: &RegularGraph, exec: Execution) -> Result<SigningSearchReport> {
    let edges = g.edge_count();
    if edges > MAX_SEARCH_EDGES {
        return Err(Error::SizeLimit(format!(
            "exhaustive signing search needs |E| <= {MAX_SEARCH_EDGES}, got {edges}"
        )));
    }
    let total = 1u64 << edges;
    let chunks = total.div_ceil(SEARCH_CHUNK) as usize;
    let results = map_indexed(exec, chunks, |c| -> Result<(f64, u64)> {
        let mut m = RealMatrix::zeros(g.n());
        let mut best = (f64::INFINITY, 0);
        let start = c as u64 * SEARCH_CHUNK;
        for mask in start..(start + SEARCH_CHUNK).min(total) {
            signed_from_mask(g, mask, &mut m);
            let r = eig_symmetric(&m, DEFAULT_TOL)?.max_abs();
            if r < best.0 {
                best = (r, mask);
            }
        }
        Ok(best)
    });
    let mut best = (f64::INFINITY, 0);
    for r in results {
        let r = r?;
        if r.0 < best.0 {
            best = r;
        }
    }
    let bound = 2.0 * (g.d() as f64 - 1.0).sqrt();
    Ok(SigningSearchReport {
        edges,
        signings_checked: total,
        min_radius: best.0,
        best_mask: best.1,
        best_signing: Signing::from_mask(edges, best.1).signs().to_vec(),
        ramanujan_bound: bound,
        within_bound: best.0 <= bound + 1e-9,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthLevel {
    pub level: usize,
    pub n: usize,
    /// Nontrivial λ of the graph at this level.
    pub lambda: f64,
    /// λ_new of the chosen lift; absent at level 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_new: Option<f64>,
    pub samples: u64,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthTrajectory {
    pub k: usize,
    #[serde(serialize_with = "crate::io::u64_as_string")]
    pub seed: u64,
    pub max_vertices: usize,
    pub levels: Vec<GrowthLevel>,
    /// Set when the next lift would exceed `max_vertices`.
    pub truncated: bool,
    #[serde(skip)]
    pub graph: RegularGraph,
}

/// Dense-solver budget used when the caller has none in mind.
pub const DEFAULT_MAX_VERTICES: usize = 2048;

/// Repeatedly lifts `g0`, keeping at each level the sampled lift with the
/// smallest `λ_new` (ties to the lower sample index). With `k = 2` and
/// `samples_per_level >= 2^|E|` every signing is tried instead.
pub fn greedy_lift_growth(
    g0: &RegularGraph,
    levels: usize,
    samples_per_level: usize,
    k: usize,
    seed: u64,
    max_vertices: usize,
    exec: Execution,
) -> Result<GrowthTrajectory> {
    if samples_per_level == 0 {
        return Err(Error::invalid("samples_per_level must be at least 1"));
    }
    let (_, lambda0) = base_lambda(g0)?;
    let mut out = GrowthTrajectory {
        k,
        seed,
        max_vertices,
        levels: vec![GrowthLevel {
            level: 0,
            n: g0.n(),
            lambda: lambda0,
            lambda_new: None,
            samples: 0,
            exhaustive: false,
        }],
        truncated: false,
        graph: g0.clone(),
    };
    for level in 1..=levels {
        let g = out.graph.clone();
        if g.n() * k > max_vertices {
            out.truncated = true;
            break;
        }
        let base = eig_symmetric(&adjacency_matrix(&g), DEFAULT_TOL)?;
        let edges = g.edge_count();
        let exhaustive = k == 2 && edges < 64 && samples_per_level as u128 >= 1u128 << edges;
        let count = if exhaustive { 1usize << edges } else { samples_per_level };
        let level_seed = derive_seed(seed, level as u64);
        let assignment = |i: usize| -> Result<LiftAssignment> {
            if exhaustive {
                Ok(signing_to_assignment(&Signing::from_mask(edges, i as u64)))
            } else {
                random_k_lift(&g, k, derive_seed(level_seed, i as u64))
            }
        };
        let scores = map_indexed(exec, count, |i| -> Result<f64> {
            let lift = build_lift(&g, &assignment(i)?)?;
            let spec = eig_symmetric(&adjacency_matrix(&lift.graph), DEFAULT_TOL)?;
            Ok(split_old_new(&base, &spec, k, MATCH_WINDOW)?.lambda_new)
        });
        let mut best = (f64::INFINITY, 0);
        for (i, s) in scores.into_iter().enumerate() {
            let s = s?;
            if s < best.0 {
                best = (s, i);
            }
        }
        let lifted = build_lift(&g, &assignment(best.1)?)?.graph;
        let (_, lambda) = base_lambda(&lifted)?;
        out.levels.push(GrowthLevel {
            level,
            n: lifted.n(),
            lambda,
            lambda_new: Some(best.0),
            samples: count as u64,
            exhaustive,
        });
        out.graph = lifted;
    }
    Ok(out)
}
