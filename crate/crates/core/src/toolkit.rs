//! Dyadic grids, randomized rounding and the geometric-log sum bound.
//!
//! All logarithms here are base 2.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexSubset;
use crate::matrix::RealMatrix;
use crate::rng::seeded;

/// Indices with a nonzero entry. Grid vectors hold exact values, so no
/// tolerance is applied.
pub fn support(u: &[f64]) -> VertexSubset {
    VertexSubset::new((0..u.len()).filter(|&j| u[j] != 0.0).collect::<Vec<_>>())
}

/// Same as [`support`] for `{-1, 0, 1}` vectors.
pub fn sign_support(u: &[i8]) -> VertexSubset {
    VertexSubset::new((0..u.len()).filter(|&j| u[j] != 0).collect::<Vec<_>>())
}

/// `2^-i` built directly from its bit pattern; exact for `1 <= i <= 1074`.
pub fn pow2_neg(i: u32) -> f64 {
    assert!((1..=1074).contains(&i), "2^-{i} is not a positive finite double");
    if i <= 1022 {
        f64::from_bits(u64::from(1023 - i) << 52)
    } else {
        f64::from_bits(1u64 << (1074 - i))
    }
}

/// `Some(i)` when `a == 2^-i` exactly with `i >= 0`.
fn dyadic_level(a: f64) -> Option<u32> {
    if !a.is_finite() || a <= 0.0 {
        return None;
    }
    let bits = a.to_bits();
    let exp = (bits >> 52) as u32;
    let mantissa = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (mantissa.count_ones() == 1).then(|| 1074 - mantissa.trailing_zeros())
    } else if mantissa == 0 && exp <= 1023 {
        Some(1023 - exp)
    } else {
        None
    }
}

/// Largest power of two `2^-i <= a`, as `i`, for `0 < a` finite.
fn floor_level(a: f64) -> u32 {
    let bits = a.to_bits();
    let exp = (bits >> 52) as i64;
    if exp == 0 {
        let mantissa = bits & ((1u64 << 52) - 1);
        1074 - (63 - mantissa.leading_zeros())
    } else {
        (1023 - exp) as u32
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicTerm {
    pub i: u32,
    pub u: Vec<i8>,
}

/// `y = Σ 2^-i u_i` with `u_i ∈ {-1,0,1}^n` on pairwise disjoint supports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicDecomposition {
    pub n: usize,
    pub terms: Vec<DyadicTerm>,
}

impl DyadicDecomposition {
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for term in &self.terms {
            let scale = pow2_neg(term.i);
            for (yj, &uj) in y.iter_mut().zip(&term.u) {
                if uj != 0 {
                    *yj = f64::from(uj) * scale;
                }
            }
        }
        y
    }

    /// `Σ 2^-2i |S(u_i)|`, which equals `‖y‖²`.
    pub fn weighted_support_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| pow2_neg(t.i).powi(2) * sign_support(&t.u).len() as f64)
            .sum()
    }
}

/// Split a vector with entries in `{0, ±1/2, ±1/4, ...}` into signed level
/// indicators, sorted by level.
pub fn dyadic_decompose(y: &[f64]) -> Result<DyadicDecomposition> {
    let n = y.len();
    let mut levels: BTreeMap<u32, Vec<i8>> = BTreeMap::new();
    for (j, &v) in y.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let i = match dyadic_level(v.abs()) {
            Some(i) if i >= 1 => i,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "entry {j} = {v:e} is not 0 or ±2^-i with i >= 1"
                )))
            }
        };
        levels.entry(i).or_insert_with(|| vec![0; n])[j] = if v > 0.0 { 1 } else { -1 };
    }
    Ok(DyadicDecomposition {
        n,
        terms: levels.into_iter().map(|(i, u)| DyadicTerm { i, u }).collect(),
    })
}

fn check_half_bounded(x: &[f64], name: &str) -> Result<()> {
    for (j, &v) in x.iter().enumerate() {
        if !v.is_finite() || v.abs() > 0.5 {
            return Err(Error::InvalidInput(format!(
                "{name}[{j}] = {v:e} is outside [-1/2, 1/2]"
            )));
        }
    }
    Ok(())
}

/// One randomized rounding: `±(1+δ)2^-i` becomes `±2^-(i-1)` with
/// probability `δ` and `±2^-i` otherwise, so each entry keeps its mean.
/// Zeros stay zero.
pub fn round_dyadic(x: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            if v == 0.0 {
                return 0.0;
            }
            let a = v.abs();
            let i = floor_level(a);
            let lower = if i == 0 { 1.0 } else { pow2_neg(i) };
            let delta = a / lower - 1.0;
            let r = if delta > 0.0 && rng.gen::<f64>() < delta {
                2.0 * lower
            } else {
                lower
            };
            r.copysign(v)
        })
        .collect()
}

fn quadratic(m: &RealMatrix, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(m.mul_vec(b)).map(|(x, y)| x * y).sum()
}

fn norm_sq(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// Slack on the quadratic-form comparison.
pub const QUADRATIC_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct Discretized {
    pub y: Vec<f64>,
    pub tries: usize,
    pub original_form: f64,
    pub rounded_form: f64,
}

fn check_square(m: &RealMatrix, n: usize) -> Result<()> {
    if m.n() != n {
        return Err(Error::invalid(format!(
            "matrix is {0}x{0} but the vector has length {n}",
            m.n()
        )));
    }
    let (dev, i, j) = m.max_asymmetry();
    if dev > 0.0 {
        return Err(Error::NotSymmetric {
            row: i,
            col: j,
            deviation: dev,
        });
    }
    Ok(())
}

/// Repeat [`round_dyadic`] until `|yᵀMy| >= |xᵀMx| - 1e-12`.
pub fn discretize(x: &[f64], m: &RealMatrix, seed: u64, max_tries: usize) -> Result<Discretized> {
    check_half_bounded(x, "x")?;
    check_square(m, x.len())?;
    if let Some(j) = (0..m.n()).find(|&j| m.get(j, j) != 0.0) {
        return Err(Error::invalid(format!("diagonal entry {j} of M is nonzero")));
    }
    let target = quadratic(m, x, x).abs();
    let mut rng = seeded(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for tries in 1..=max_tries {
        let y = round_dyadic(x, &mut rng);
        let form = quadratic(m, &y, &y);
        if form.abs() >= target - QUADRATIC_SLACK {
            return Ok(Discretized {
                y,
                tries,
                original_form: target,
                rounded_form: form.abs(),
            });
        }
        let deficit = target - form.abs();
        if best.as_ref().is_none_or(|(b, _)| deficit < *b) {
            best = Some((deficit, y));
        }
    }
    let (best_deficit, best) = best.unwrap_or((f64::INFINITY, Vec::new()));
    Err(Error::SearchFailure {
        tries: max_tries,
        best_deficit,
        best,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscretizedPair {
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
    pub tries: usize,
    pub original_form: f64,
    pub rounded_form: f64,
}

/// Bilinear version: round both vectors independently from one seed and
/// retry the pair jointly until `|y1ᵀMy2| >= |x1ᵀMx2| - 1e-12`.
pub fn discretize_pair(x1: &[f64], x2: &[f64], m: &RealMatrix, seed: u64, max_tries: usize) -> Result<DiscretizedPair> {
    check_half_bounded(x1, "x1")?;
    check_half_bounded(x2, "x2")?;
    if x1.len() != x2.len() {
        return Err(Error::invalid("x1 and x2 differ in length"));
    }
    check_square(m, x1.len())?;
    let target = quadratic(m, x1, x2).abs();
    let mut rng = seeded(seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for tries in 1..=max_tries {
        let y1 = round_dyadic(x1, &mut rng);
        let y2 = round_dyadic(x2, &mut rng);
        let form = quadratic(m, &y1, &y2);
        if form.abs() >= target - QUADRATIC_SLACK {
            return Ok(DiscretizedPair {
                y1,
                y2,
                tries,
                original_form: target,
                rounded_form: form.abs(),
            });
        }
        let deficit = target - form.abs();
        if best.as_ref().is_none_or(|(b, _)| deficit < *b) {
            best = Some((deficit, y1.into_iter().chain(y2).collect()));
        }
    }
    let (best_deficit, best) = best.unwrap_or((f64::INFINITY, Vec::new()));
    Err(Error::SearchFailure {
        tries: max_tries,
        best_deficit,
        best,
    })
}

/// `‖y‖² <= 4‖x‖²`, which every rounding satisfies.
pub fn norm_bound_holds(x: &[f64], y: &[f64]) -> bool {
    norm_sq(y) <= 4.0 * norm_sq(x)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LogSumBound {
    pub lhs: f64,
    pub rhs: f64,
    pub c_r: f64,
    pub holds: bool,
}

/// `α(r) = (r (1 + log r) / (1 + 2 log r))^x`.
pub fn alpha_r(r: f64, x: f64) -> f64 {
    let l = r.log2();
    (r * (1.0 + l) / (1.0 + 2.0 * l)).powf(x)
}

/// `c(r) = 1 + α/(α - 1)`.
pub fn c_r(r: f64, x: f64) -> f64 {
    let a = alpha_r(r, x);
    1.0 + a / (a - 1.0)
}

/// `Σ_{i=0..t} (r^i log(z/r^i))^x` against `c(r) (r^t log(z/r^t))^x`.
pub fn agp_log_bound(r: f64, t: u32, z: f64, x: f64) -> Result<LogSumBound> {
    if !(r.is_finite() && r >= 2.0) {
        return Err(Error::invalid(format!("r = {r} must be at least 2")));
    }
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid(format!("x = {x} must be positive")));
    }
    let rt = r.powi(t as i32);
    if !(z.is_finite() && rt.is_finite() && rt <= z / 2.0) {
        return Err(Error::invalid(format!("r^t = {rt} must be at most z/2 = {}", z / 2.0)));
    }
    let term = |i: u32| {
        let ri = r.powi(i as i32);
        (ri * (z / ri).log2()).powf(x)
    };
    let lhs: f64 = (0..=t).map(term).sum();
    let c = c_r(r, x);
    let rhs = c * term(t);
    Ok(LogSumBound {
        lhs,
        rhs,
        c_r: c,
        holds: lhs <= rhs,
    })
}
