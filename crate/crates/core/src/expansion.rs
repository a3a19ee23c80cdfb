//! Combinatorial expansion, Cheeger bounds and expander-mixing checks.
//!
//! Exhaustive routines enumerate vertex subsets as bitmasks in Gray-code
//! order, so each step changes the running edge count in O(1). Work is split
//! across threads by the high bits of the mask and merged in index order,
//! which keeps results (including tie-breaks) identical to a sequential run.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{adjacency_matrix, edges_between, RegularGraph, VertexSubset};
use crate::par::{map_indexed, Execution};
use crate::rng::seeded;
use crate::spectral::{eig_symmetric, lambda_nontrivial, DEFAULT_TOL};

/// Largest graph for exhaustive expansion.
pub const EXHAUSTIVE_EXPANSION_LIMIT: usize = 24;
/// Largest graph for exhaustive subset-pair enumeration.
pub const EXHAUSTIVE_PAIR_LIMIT: usize = 12;
/// Slack allowed on every inequality check.
pub const CHECK_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubsetMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

impl SubsetMode {
    fn name(&self) -> &'static str {
        match self {
            SubsetMode::Exhaustive => "exhaustive",
            SubsetMode::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    /// `min |E(S, V∖S)| / |S|` over the subsets examined. For sampled runs
    /// this is only an upper bound on the true expansion.
    pub h: f64,
    pub cut_edges: usize,
    pub subset_size: usize,
    pub argmin: Vec<usize>,
    pub method: &'static str,
    pub upper_bound_only: bool,
    pub lambda2: f64,
    pub cheeger_lower: f64,
    pub cheeger_upper: f64,
}

fn lambda2(g: &RegularGraph) -> Result<f64> {
    let s = eig_symmetric(&adjacency_matrix(g), DEFAULT_TOL)?;
    Ok(s.second().unwrap_or(s.largest()))
}

/// Best `(cut, size, mask)` by ratio, then by smaller mask.
#[derive(Clone, Copy, Debug)]
struct Cut {
    cut: u64,
    size: u64,
    mask: u64,
}

impl Cut {
    fn better_than(&self, other: &Option<Cut>) -> bool {
        match other {
            None => true,
            Some(o) => {
                let lhs = self.cut * o.size;
                let rhs = o.cut * self.size;
                lhs < rhs || (lhs == rhs && self.mask < o.mask)
            }
        }
    }
}

fn prefix_bits(n: usize) -> usize {
    n.saturating_sub(10).min(8)
}

fn exhaustive_min_cut(g: &RegularGraph) -> Option<Cut> {
    let n = g.n();
    let d = g.d() as u64;
    let masks = g.neighbor_masks();
    let p = prefix_bits(n);
    let low = n - p;
    let half = (n / 2) as u64;
    let chunks = map_indexed(Execution::Parallel, 1 << p, |prefix| {
        let mut s: u64 = (prefix as u64) << low;
        let mut size = u64::from(s.count_ones());
        let mut cut: u64 = (0..n)
            .filter(|&u| s >> u & 1 == 1)
            .map(|u| u64::from((masks[u] & !s).count_ones()))
            .sum();
        let mut best: Option<Cut> = None;
        let consider = |cut: u64, size: u64, s: u64, best: &mut Option<Cut>| {
            if size >= 1 && size <= half {
                let c = Cut { cut, size, mask: s };
                if c.better_than(best) {
                    *best = Some(c);
                }
            }
        };
        consider(cut, size, s, &mut best);
        for step in 1u64..(1u64 << low) {
            let v = step.trailing_zeros() as usize;
            let inside = u64::from((masks[v] & s).count_ones());
            if s >> v & 1 == 0 {
                cut = cut + d - 2 * inside;
                size += 1;
            } else {
                cut = cut + 2 * inside - d;
                size -= 1;
            }
            s ^= 1 << v;
            consider(cut, size, s, &mut best);
        }
        best
    });
    let mut best: Option<Cut> = None;
    for c in chunks.into_iter().flatten() {
        if c.better_than(&best) {
            best = Some(c);
        }
    }
    best
}

fn random_subset(n: usize, rng: &mut impl Rng) -> Vec<bool> {
    loop {
        let s: Vec<bool> = (0..n).map(|_| rng.gen::<bool>()).collect();
        let size = s.iter().filter(|&&x| x).count();
        if size > 0 && size < n {
            return s;
        }
    }
}

/// Combinatorial expansion with Cheeger bounds from `λ₂`.
pub fn combinatorial_expansion(g: &RegularGraph, mode: SubsetMode) -> Result<ExpansionReport> {
    let n = g.n();
    let (cut, size, argmin) = match mode {
        SubsetMode::Exhaustive => {
            if n > EXHAUSTIVE_EXPANSION_LIMIT {
                return Err(Error::SizeLimit(format!(
                    "exhaustive expansion needs n <= {EXHAUSTIVE_EXPANSION_LIMIT}, got {n}"
                )));
            }
            match exhaustive_min_cut(g) {
                Some(c) => (c.cut as usize, c.size as usize, VertexSubset::from_mask(c.mask)),
                None => return Err(Error::invalid("graph has no admissible subset")),
            }
        }
        SubsetMode::Sampled { count, seed } => {
            if count == 0 || n < 2 {
                return Err(Error::invalid("sampled expansion needs count >= 1 and n >= 2"));
            }
            let mut rng = seeded(seed);
            let mut best: Option<(usize, usize, Vec<usize>)> = None;
            for _ in 0..count {
                let mut s = random_subset(n, &mut rng);
                if s.iter().filter(|&&x| x).count() > n / 2 {
                    s.iter_mut().for_each(|x| *x = !*x);
                }
                let members: Vec<usize> = (0..n).filter(|&v| s[v]).collect();
                let cut: usize = members
                    .iter()
                    .map(|&u| g.neighbors(u).iter().filter(|&&w| !s[w]).count())
                    .sum();
                let size = members.len();
                let better = match &best {
                    None => true,
                    Some((bc, bs, _)) => cut * bs < bc * size,
                };
                if better {
                    best = Some((cut, size, members));
                }
            }
            let (cut, size, members) = best.expect("count >= 1");
            (cut, size, VertexSubset::new(members))
        }
    };
    let d = g.d() as f64;
    let l2 = lambda2(g)?;
    Ok(ExpansionReport {
        h: cut as f64 / size as f64,
        cut_edges: cut,
        subset_size: size,
        argmin: argmin.members().to_vec(),
        method: mode.name(),
        upper_bound_only: matches!(mode, SubsetMode::Sampled { .. }),
        lambda2: l2,
        cheeger_lower: (d - l2) / 2.0,
        cheeger_upper: (d * (d - l2)).max(0.0).sqrt(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CheegerReport {
    pub expansion: ExpansionReport,
    pub lower_holds: bool,
    pub upper_holds: bool,
    pub passed: bool,
}

/// `(d - λ₂)/2 <= h <= sqrt(d (d - λ₂))` with exhaustive `h`.
pub fn cheeger_check(g: &RegularGraph) -> Result<CheegerReport> {
    let expansion = combinatorial_expansion(g, SubsetMode::Exhaustive)?;
    let lower_holds = expansion.cheeger_lower <= expansion.h + CHECK_SLACK;
    let upper_holds = expansion.h <= expansion.cheeger_upper + CHECK_SLACK;
    Ok(CheegerReport {
        expansion,
        lower_holds,
        upper_holds,
        passed: lower_holds && upper_holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EmlReport {
    pub method: &'static str,
    pub lambda: f64,
    /// `max |E(S,T) - d|S||T|/n| / sqrt(|S||T|)` over the pairs examined.
    pub max_ratio: f64,
    pub worst_s: Vec<usize>,
    pub worst_t: Vec<usize>,
    pub pairs_checked: u64,
    pub passed: bool,
}

/// λ in the convention used for the mixing check: largest `|λ_i|` with only
/// one copy of `d` removed, even for bipartite graphs.
pub fn eml_lambda(g: &RegularGraph) -> Result<f64> {
    let s = eig_symmetric(&adjacency_matrix(g), DEFAULT_TOL)?;
    lambda_nontrivial(&s, g.d(), false)
}

#[derive(Clone, Copy, Debug)]
struct Worst {
    ratio: f64,
    s: u64,
    t: u64,
}

fn exhaustive_max_ratio(g: &RegularGraph, allowed_s: u64, allowed_t: u64, side: f64) -> (Worst, u64) {
    let n = g.n();
    let d = g.d() as i64;
    let masks = g.neighbor_masks();
    let s_bits: Vec<usize> = (0..n).filter(|&v| allowed_s >> v & 1 == 1).collect();
    let t_bits: Vec<usize> = (0..n).filter(|&v| allowed_t >> v & 1 == 1).collect();
    let sqrt_table: Vec<f64> = (0..=n * n).map(|x| (x as f64).sqrt()).collect();
    let scale = side;
    let s_count = 1u64 << s_bits.len();
    let chunk = 64u64;
    let chunks = s_count.div_ceil(chunk);
    let results = map_indexed(Execution::Parallel, chunks as usize, |c| {
        let mut worst = Worst {
            ratio: -1.0,
            s: 0,
            t: 0,
        };
        let mut pairs = 0u64;
        let mut inter = vec![0i64; n];
        for idx in (c as u64 * chunk).max(1)..((c as u64 + 1) * chunk).min(s_count) {
            let s: u64 = s_bits
                .iter()
                .enumerate()
                .filter(|(b, _)| idx >> b & 1 == 1)
                .fold(0, |m, (_, &v)| m | 1 << v);
            let s_size = i64::from(s.count_ones());
            for v in 0..n {
                inter[v] = i64::from((masks[v] & s).count_ones());
            }
            let mut t: u64 = 0;
            let mut e: i64 = 0;
            let mut t_size: i64 = 0;
            for step in 1u64..(1u64 << t_bits.len()) {
                let v = t_bits[step.trailing_zeros() as usize];
                if t >> v & 1 == 0 {
                    e += inter[v];
                    t_size += 1;
                } else {
                    e -= inter[v];
                    t_size -= 1;
                }
                t ^= 1 << v;
                if t_size == 0 {
                    continue;
                }
                pairs += 1;
                // |E - d s t / side| / sqrt(s t), computed from integers.
                let dev = (e as f64 * scale - (d * s_size * t_size) as f64).abs() / scale;
                let ratio = dev / sqrt_table[(s_size * t_size) as usize];
                if ratio > worst.ratio {
                    worst = Worst { ratio, s, t };
                }
            }
        }
        (worst, pairs)
    });
    let mut worst = Worst {
        ratio: -1.0,
        s: 0,
        t: 0,
    };
    let mut total = 0;
    for (w, p) in results {
        total += p;
        if w.ratio > worst.ratio {
            worst = w;
        }
    }
    (worst, total)
}

fn random_mask(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    loop {
        let s: Vec<usize> = (0..n).filter(|_| rng.gen::<bool>()).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

/// Expander-mixing check against `lambda` over ordered pairs of nonempty
/// subsets; `E(S,T)` counts ordered incidences (see [`edges_between`]).
pub fn eml_check(g: &RegularGraph, lambda: f64, mode: SubsetMode) -> Result<EmlReport> {
    let n = g.n();
    let (max_ratio, worst_s, worst_t, pairs) = match mode {
        SubsetMode::Exhaustive => {
            if n > EXHAUSTIVE_PAIR_LIMIT {
                return Err(Error::SizeLimit(format!(
                    "exhaustive subset pairs need n <= {EXHAUSTIVE_PAIR_LIMIT}, got {n}"
                )));
            }
            let all = (1u64 << n) - 1;
            let (w, pairs) = exhaustive_max_ratio(g, all, all, n as f64);
            (
                w.ratio,
                VertexSubset::from_mask(w.s).members().to_vec(),
                VertexSubset::from_mask(w.t).members().to_vec(),
                pairs,
            )
        }
        SubsetMode::Sampled { count, seed } => {
            let mut rng = seeded(seed);
            let mut best = (-1.0, Vec::new(), Vec::new());
            let d = g.d() as f64;
            for _ in 0..count {
                let s = VertexSubset::new(random_mask(n, &mut rng));
                let t = VertexSubset::new(random_mask(n, &mut rng));
                let e = edges_between(g, &s, &t)? as f64;
                let st = (s.len() * t.len()) as f64;
                let ratio = (e - d * st / n as f64).abs() / st.sqrt();
                if ratio > best.0 {
                    best = (ratio, s.members().to_vec(), t.members().to_vec());
                }
            }
            (best.0.max(0.0), best.1, best.2, count as u64)
        }
    };
    Ok(EmlReport {
        method: mode.name(),
        lambda,
        max_ratio,
        worst_s,
        worst_t,
        pairs_checked: pairs,
        passed: max_ratio <= lambda + CHECK_SLACK,
    })
}

/// Bipartite variant: `S` ranges over one colour class and `T` over the
/// other, the expected count uses the class size `n/2`, and λ excludes both
/// `d` and `-d`. Exhaustive only.
pub fn eml_check_bipartite(g: &RegularGraph) -> Result<EmlReport> {
    let n = g.n();
    if n > EXHAUSTIVE_PAIR_LIMIT {
        return Err(Error::SizeLimit(format!(
            "exhaustive subset pairs need n <= {EXHAUSTIVE_PAIR_LIMIT}, got {n}"
        )));
    }
    if !g.is_bipartite() || !g.is_connected() {
        return Err(Error::invalid(
            "bipartite mixing check needs a connected bipartite graph",
        ));
    }
    let mut side = vec![u8::MAX; n];
    side[0] = 0;
    let mut stack = vec![0];
    while let Some(u) = stack.pop() {
        for &w in g.neighbors(u) {
            if side[w] == u8::MAX {
                side[w] = 1 - side[u];
                stack.push(w);
            }
        }
    }
    let left = (0..n).filter(|&v| side[v] == 0).fold(0u64, |m, v| m | 1 << v);
    let right = (0..n).filter(|&v| side[v] == 1).fold(0u64, |m, v| m | 1 << v);
    let s = eig_symmetric(&adjacency_matrix(g), DEFAULT_TOL)?;
    let lambda = lambda_nontrivial(&s, g.d(), true)?;
    let (w, pairs) = exhaustive_max_ratio(g, left, right, (n / 2) as f64);
    Ok(EmlReport {
        method: "exhaustive-bipartite",
        lambda,
        max_ratio: w.ratio,
        worst_s: VertexSubset::from_mask(w.s).members().to_vec(),
        worst_t: VertexSubset::from_mask(w.t).members().to_vec(),
        pairs_checked: pairs,
        passed: w.ratio <= lambda + CHECK_SLACK,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConverseEmlReport {
    /// Observed mixing constant: the largest deviation ratio.
    pub alpha: f64,
    pub lambda: f64,
    /// `α (1 + log2(d / α))`; reported for comparison only.
    pub converse_scale: f64,
}

pub fn converse_eml_alpha(g: &RegularGraph, mode: SubsetMode) -> Result<ConverseEmlReport> {
    let lambda = eml_lambda(g)?;
    let eml = eml_check(g, lambda, mode)?;
    let alpha = eml.max_ratio;
    let d = g.d() as f64;
    let converse_scale = if alpha > 0.0 {
        alpha * (1.0 + (d / alpha).log2())
    } else {
        0.0
    };
    Ok(ConverseEmlReport {
        alpha,
        lambda,
        converse_scale,
    })
}
