//! Spot checks of the two bilinear tail inequalities for random signings.
//!
//! Each draw takes a fresh uniform signing and random admissible vectors:
//! support sizes uniformly among admissible sizes, then uniform supports,
//! then uniform ±1 entries.

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use super::trials::base_lambda;
use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::par::{map_indexed, Execution};
use crate::rng::{derive_seed, seeded, LabRng};

/// Rejection cap per draw when the sampled level sizes overflow `n`.
pub const MAX_REJECTIONS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaKind {
    /// `|S(u)| <= |S(v)| <= d|S(u)|`, `|S(v)| > n/d²`, `(d/λ)√(|S(u)||S(v)|) < n`.
    Lemma3,
    /// Levels `u_i` with `|S(v)| >= 4^i |S(u_i)|` and `(d/λ)√(|S(u_i)||S(v)|) >= n`.
    Lemma4,
}

impl std::str::FromStr for LemmaKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lemma3" => Ok(LemmaKind::Lemma3),
            "lemma4" => Ok(LemmaKind::Lemma4),
            _ => Err(Error::invalid(format!("unknown lemma {s:?}"))),
        }
    }
}

/// One admissible pair of test vectors with the bound it must satisfy.
#[derive(Clone, Debug)]
pub struct LemmaDraw {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub bound: f64,
}

/// Precomputed admissible support sizes for one graph.
#[derive(Clone, Debug)]
pub struct LemmaSampler {
    kind: LemmaKind,
    n: usize,
    d: usize,
    lambda: f64,
    /// `Lemma3`: `(|S(u)|, |S(v)|)`. `Lemma4`: `(|S(v)|, 0)`.
    sizes: Vec<(usize, usize)>,
}

fn wide_enough(d: f64, lambda: f64, a: usize, b: usize) -> f64 {
    d / lambda * ((a * b) as f64).sqrt()
}

impl LemmaSampler {
    pub fn new(g: &RegularGraph, lambda: f64, kind: LemmaKind) -> Self {
        let (n, d) = (g.n(), g.d());
        let df = d as f64;
        let mut sizes = Vec::new();
        match kind {
            LemmaKind::Lemma3 => {
                for su in 1..=n {
                    for sv in su..=n.min(d * su) {
                        if (sv * d * d) > n && wide_enough(df, lambda, su, sv) < n as f64 {
                            sizes.push((su, sv));
                        }
                    }
                }
            }
            LemmaKind::Lemma4 => {
                for sv in 1..=n {
                    let s = LemmaSampler {
                        kind,
                        n,
                        d,
                        lambda,
                        sizes: Vec::new(),
                    };
                    if !s.level_ranges(sv).is_empty() {
                        sizes.push((sv, 0));
                    }
                }
            }
        }
        LemmaSampler {
            kind,
            n,
            d,
            lambda,
            sizes,
        }
    }

    pub fn is_applicable(&self) -> bool {
        !self.sizes.is_empty()
    }

    pub fn admissible_sizes(&self) -> usize {
        self.sizes.len()
    }

    /// `(i, lo, hi)` for every level `i` that admits some `|S(u_i)|` in
    /// `lo..=hi` when `|S(v)| = sv`.
    fn level_ranges(&self, sv: usize) -> Vec<(u32, usize, usize)> {
        let df = self.d as f64;
        let mut out = Vec::new();
        for i in 0u32.. {
            let cap = sv >> (2 * i);
            if cap == 0 || i >= 32 {
                break;
            }
            let hi = cap.min(self.n);
            if let Some(lo) = (1..=hi).find(|&a| wide_enough(df, self.lambda, a, sv) >= self.n as f64) {
                out.push((i, lo, hi));
            }
        }
        out
    }

    fn signed_vector(&self, rng: &mut LabRng, members: &[usize], scale: f64, out: &mut [f64]) {
        for &x in members {
            out[x] = if rng.gen::<bool>() { scale } else { -scale };
        }
    }

    /// Draws admissible vectors, or `None` after [`MAX_REJECTIONS`] failed
    /// attempts to fit disjoint level supports.
    pub fn draw(&self, rng: &mut LabRng) -> Option<LemmaDraw> {
        let n = self.n;
        let df = self.d as f64;
        match self.kind {
            LemmaKind::Lemma3 => {
                let (su, sv) = self.sizes[rng.gen_range(0..self.sizes.len())];
                let mut u = vec![0.0; n];
                let mut v = vec![0.0; n];
                let su_set = sample(rng, n, su).into_vec();
                self.signed_vector(rng, &su_set, 1.0, &mut u);
                let sv_set = sample(rng, n, sv).into_vec();
                self.signed_vector(rng, &sv_set, 1.0, &mut v);
                let (a, b) = (su as f64, sv as f64);
                let bound = 8.0 * (self.lambda * (a * b).sqrt() * b * (2.0 * df * a / b).log2()).sqrt();
                Some(LemmaDraw { u, v, bound })
            }
            LemmaKind::Lemma4 => {
                let (sv, _) = self.sizes[rng.gen_range(0..self.sizes.len())];
                let ranges = self.level_ranges(sv);
                for _ in 0..MAX_REJECTIONS {
                    let mut chosen: Vec<_> = ranges.iter().filter(|_| rng.gen::<bool>()).copied().collect();
                    if chosen.is_empty() {
                        chosen.push(ranges[rng.gen_range(0..ranges.len())]);
                    }
                    let counts: Vec<usize> = chosen.iter().map(|&(_, lo, hi)| rng.gen_range(lo..=hi)).collect();
                    let total: usize = counts.iter().sum();
                    if total > n {
                        continue;
                    }
                    let pool = sample(rng, n, total).into_vec();
                    let mut u = vec![0.0; n];
                    let mut weight = 0.0;
                    let mut start = 0;
                    for (&(i, _, _), &c) in chosen.iter().zip(&counts) {
                        self.signed_vector(rng, &pool[start..start + c], f64::from(1u32 << i), &mut u);
                        start += c;
                        weight += c as f64 * 4f64.powi(i as i32);
                    }
                    let mut v = vec![0.0; n];
                    let sv_set = sample(rng, n, sv).into_vec();
                    self.signed_vector(rng, &sv_set, 1.0, &mut v);
                    let b = sv as f64;
                    let bound = 8.0 * (df / n as f64 * b * b * weight * (2.0 * n as f64 / b).log2()).sqrt();
                    return Some(LemmaDraw { u, v, bound });
                }
                None
            }
        }
    }
}

fn random_signs(g: &RegularGraph, rng: &mut LabRng) -> Vec<f64> {
    (0..g.edge_count())
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// `aᵀ A_s b` summed over edges.
pub fn signed_bilinear(g: &RegularGraph, signs: &[f64], a: &[f64], b: &[f64]) -> f64 {
    g.edges()
        .iter()
        .zip(signs)
        .map(|(&(x, y), s)| s * (a[x] * b[y] + a[y] * b[x]))
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: LemmaKind,
    pub n: usize,
    pub d: usize,
    pub lambda: f64,
    pub applicable: bool,
    pub admissible_sizes: usize,
    pub trials: usize,
    pub evaluated: usize,
    pub rejected_draws: usize,
    pub violations: usize,
    pub violation_rate: f64,
    /// Largest `|aᵀA_s b| / bound` seen.
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

pub fn lemma_inequality_spot_check(
    g: &RegularGraph,
    trials: usize,
    seed: u64,
    which: LemmaKind,
    exec: Execution,
) -> Result<LemmaReport> {
    let (_, lambda) = base_lambda(g)?;
    if lambda <= 0.0 {
        return Err(Error::invalid("the inequalities need λ > 0"));
    }
    let sampler = LemmaSampler::new(g, lambda, which);
    let mut report = LemmaReport {
        lemma: which,
        n: g.n(),
        d: g.d(),
        lambda,
        applicable: sampler.is_applicable(),
        admissible_sizes: sampler.admissible_sizes(),
        trials,
        evaluated: 0,
        rejected_draws: 0,
        violations: 0,
        violation_rate: f64::NAN,
        max_ratio: f64::NAN,
        mean_ratio: f64::NAN,
    };
    if !report.applicable {
        return Ok(report);
    }
    let ratios = map_indexed(exec, trials, |t| {
        let mut rng = seeded(derive_seed(seed, t as u64));
        let signs = random_signs(g, &mut rng);
        sampler.draw(&mut rng).map(|draw| {
            let (a, b) = match which {
                LemmaKind::Lemma3 => (&draw.u, &draw.v),
                LemmaKind::Lemma4 => (&draw.v, &draw.u),
            };
            signed_bilinear(g, &signs, a, b).abs() / draw.bound
        })
    });
    let done: Vec<f64> = ratios.iter().flatten().copied().collect();
    report.evaluated = done.len();
    report.rejected_draws = trials - done.len();
    report.violations = done.iter().filter(|&&r| r > 1.0).count();
    if !done.is_empty() {
        report.violation_rate = report.violations as f64 / done.len() as f64;
        report.max_ratio = done.iter().fold(0.0, |m: f64, &r| m.max(r));
        report.mean_ratio = done.iter().sum::<f64>() / done.len() as f64;
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct MeanCheck {
    pub samples: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `sqrt(Σ_e (a_x b_y + a_y b_x)² / samples)`, the exact standard error.
    pub exact_std_error: f64,
    pub within_three_se: bool,
}

/// For fixed `a`, `b`, the mean of `aᵀ A_s b` over uniform signings; every
/// edge contributes an independent symmetric term, so the mean is zero.
pub fn bilinear_mean_check(g: &RegularGraph, a: &[f64], b: &[f64], samples: usize, seed: u64) -> Result<MeanCheck> {
    if a.len() != g.n() || b.len() != g.n() {
        return Err(Error::invalid("vector length differs from the vertex count"));
    }
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let mut rng = seeded(seed);
    let values: Vec<f64> = (0..samples)
        .map(|_| signed_bilinear(g, &random_signs(g, &mut rng), a, b))
        .collect();
    let m = samples as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let std_error = (var / m).sqrt();
    let exact_var: f64 = g
        .edges()
        .iter()
        .map(|&(x, y)| (a[x] * b[y] + a[y] * b[x]).powi(2))
        .sum();
    let exact_std_error = (exact_var / m).sqrt();
    Ok(MeanCheck {
        samples,
        mean,
        std_error,
        exact_std_error,
        within_three_se: mean.abs() <= 3.0 * exact_std_error,
    })
}
