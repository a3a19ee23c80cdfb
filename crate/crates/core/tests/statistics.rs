//! Distributional checks on the samplers. Seeds are fixed so each test is
//! deterministic; critical values are the 0.999 quantiles of chi-square.

use liftlab::graph::{complete_graph, cycle_graph};
use liftlab::lift::{random_k_lift, random_shift_lift, random_signing};
use liftlab::matrix::RealMatrix;
use liftlab::rng::{derive_seed, seeded};
use liftlab::toolkit::round_dyadic;
use rand::Rng;

const CHI2_999_DF5: f64 = 20.515;
const CHI2_999_DF24: f64 = 51.179;
const CHI2_999_DF63: f64 = 103.442;

/// Largest power of two not above `a`, by repeated halving.
fn grid_floor(a: f64) -> f64 {
    let mut p = 1.0;
    while p > a {
        p /= 2.0;
    }
    p
}

fn chi_square(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
}

#[test]
fn signings_are_uniform_over_all_masks() {
    let g = complete_graph(4).unwrap();
    let mut counts = vec![0u64; 64];
    for t in 0..64_000 {
        let s = random_signing(&g, derive_seed(9, t));
        let mask = s
            .signs()
            .iter()
            .enumerate()
            .fold(0usize, |m, (e, &x)| m | (usize::from(x < 0) << e));
        counts[mask] += 1;
    }
    let stat = chi_square(&counts);
    assert!(stat < CHI2_999_DF63, "chi2 = {stat}");
}

#[test]
fn shifts_are_uniform_pairwise() {
    let g = cycle_graph(3).unwrap();
    let mut counts = vec![0u64; 25];
    for t in 0..25_000 {
        let sa = random_shift_lift(&g, 5, derive_seed(3, t)).unwrap();
        counts[sa.shifts()[0] * 5 + sa.shifts()[2]] += 1;
    }
    let stat = chi_square(&counts);
    assert!(stat < CHI2_999_DF24, "chi2 = {stat}");
}

#[test]
fn permutations_are_uniform_on_s3() {
    let g = cycle_graph(3).unwrap();
    let all: Vec<Vec<usize>> = vec![
        vec![0, 1, 2],
        vec![0, 2, 1],
        vec![1, 0, 2],
        vec![1, 2, 0],
        vec![2, 0, 1],
        vec![2, 1, 0],
    ];
    let mut counts = vec![0u64; 6];
    for t in 0..12_000 {
        let a = random_k_lift(&g, 3, derive_seed(17, t)).unwrap();
        for p in a.perms() {
            counts[all.iter().position(|q| q == p).unwrap()] += 1;
        }
    }
    let stat = chi_square(&counts);
    assert!(stat < CHI2_999_DF5, "chi2 = {stat}");
}

#[test]
fn rounding_is_unbiased_per_entry() {
    let x = [0.3, -0.17, 0.5, 0.0, 0.0625, -0.4999, 0.011, 1e-5];
    let rounds = 20_000;
    let mut rng = seeded(123);
    let mut sums = [0.0; 8];
    for _ in 0..rounds {
        for (s, y) in sums.iter_mut().zip(round_dyadic(&x, &mut rng)) {
            *s += y;
        }
    }
    for (&xi, s) in x.iter().zip(sums) {
        let mean = s / rounds as f64;
        if xi == 0.0 {
            assert_eq!(mean, 0.0);
            continue;
        }
        // Two-point law on {lower, 2 lower}: variance lower² δ(1-δ).
        let lower = grid_floor(xi.abs());
        let delta = xi.abs() / lower - 1.0;
        let se = lower * (delta * (1.0 - delta) / rounds as f64).sqrt();
        assert!(
            (mean - xi).abs() <= 3.0 * se + 1e-15,
            "x = {xi}, mean = {mean}, se = {se}"
        );
    }
}

fn random_matrix(n: usize, seed: u64, zero_diag: bool) -> RealMatrix {
    let mut rng = seeded(seed);
    let mut m = RealMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            if i == j && zero_diag {
                continue;
            }
            let v = rng.gen_range(-1.0..1.0);
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    m
}

fn form(m: &RealMatrix, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(m.mul_vec(b)).map(|(x, y)| x * y).sum()
}

/// Sample mean and its standard error.
fn mean_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn quadratic_form_is_preserved_in_expectation() {
    let n = 8;
    let m = random_matrix(n, 1, true);
    let mut rng = seeded(2);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let target = form(&m, &x, &x);
    let samples: Vec<f64> = (0..20_000)
        .map(|_| {
            let y = round_dyadic(&x, &mut rng);
            form(&m, &y, &y)
        })
        .collect();
    let (mean, se) = mean_se(&samples);
    assert!((mean - target).abs() <= 4.0 * se, "{mean} vs {target} (se {se})");
}

#[test]
fn bilinear_form_is_preserved_even_with_diagonal() {
    let n = 8;
    let m = random_matrix(n, 4, false);
    let mut rng = seeded(5);
    let x1: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let x2: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let target = form(&m, &x1, &x2);
    let samples: Vec<f64> = (0..20_000)
        .map(|_| {
            let y1 = round_dyadic(&x1, &mut rng);
            let y2 = round_dyadic(&x2, &mut rng);
            form(&m, &y1, &y2)
        })
        .collect();
    let (mean, se) = mean_se(&samples);
    assert!((mean - target).abs() <= 4.0 * se, "{mean} vs {target} (se {se})");
}

#[test]
fn diagonal_breaks_the_single_vector_identity() {
    // E[y_j²] > x_j² whenever x_j is off the grid, so the identity needs a
    // zero diagonal.
    let x = [0.3, 0.2, 0.45];
    let mut m = RealMatrix::zeros(3);
    (0..3).for_each(|i| m.set(i, i, 1.0));
    let exact: f64 = x
        .iter()
        .map(|&v: &f64| {
            let lower = grid_floor(v);
            let delta = v / lower - 1.0;
            (1.0 - delta) * lower * lower + delta * 4.0 * lower * lower
        })
        .sum();
    let target = form(&m, &x, &x);
    assert!(exact > target + 0.01);
    let mut rng = seeded(8);
    let samples: Vec<f64> = (0..20_000)
        .map(|_| {
            let y = round_dyadic(&x, &mut rng);
            form(&m, &y, &y)
        })
        .collect();
    let (mean, se) = mean_se(&samples);
    assert!((mean - exact).abs() <= 4.0 * se, "{mean} vs {exact}");
}
