//! Spectra of symmetric and Hermitian matrices, and the old/new split of a
//! lift spectrum.

mod eigen;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{cdot, HermitianMatrix, RealMatrix};

pub use eigen::MAX_QL_ITERATIONS;

/// Default residual tolerance, relative to the Frobenius norm.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Window used when pairing eigenvalues across two spectra.
pub const MATCH_WINDOW: f64 = 1e-6;
/// Largest accepted `|M[i][j] - M[j][i]|` for "symmetric" input.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Real eigenvalues sorted in descending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    tol: f64,
}

impl Spectrum {
    /// Sorts `values` descending.
    pub fn new(mut values: Vec<f64>, tol: f64) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values, tol }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn largest(&self) -> f64 {
        self.values[0]
    }

    /// Second largest eigenvalue (signed).
    pub fn second(&self) -> Option<f64> {
        self.values.get(1).copied()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Multiset union of two spectra.
    pub fn union(&self, other: &Spectrum) -> Spectrum {
        let mut v = self.values.clone();
        v.extend_from_slice(&other.values);
        Spectrum::new(v, self.tol.max(other.tol))
    }

    /// Largest pairwise gap between the two sorted sequences, or `None` when
    /// the lengths differ.
    pub fn max_deviation(&self, other: &Spectrum) -> Option<f64> {
        (self.len() == other.len()).then(|| {
            self.values
                .iter()
                .zip(&other.values)
                .fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()))
        })
    }
}

/// Eigenvalues with unit eigenvectors, in the same descending order.
#[derive(Clone, Debug)]
pub struct EigenPairs<T> {
    pub spectrum: Spectrum,
    pub vectors: Vec<Vec<T>>,
}

fn check_symmetric(m: &RealMatrix) -> Result<()> {
    let (dev, row, col) = m.max_asymmetry();
    if dev > SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            row,
            col,
            deviation: dev,
        });
    }
    Ok(())
}

/// All eigenvalues of a real symmetric matrix.
pub fn eig_symmetric(m: &RealMatrix, tol: f64) -> Result<Spectrum> {
    check_symmetric(m)?;
    let values = eigen::eigenvalues(m.n(), m.clone().into_vec())?;
    Ok(Spectrum { values, tol })
}

/// Eigenpairs of a real symmetric matrix. Fails if any returned pair has
/// residual `|Mv - λv| > tol * |M|_F`.
pub fn eig_symmetric_vectors(m: &RealMatrix, tol: f64) -> Result<EigenPairs<f64>> {
    check_symmetric(m)?;
    let (values, vectors) = eigen::eigenpairs(m.n(), m.clone().into_vec())?;
    let limit = tol * m.frobenius_norm();
    for (index, (lambda, v)) in values.iter().zip(&vectors).enumerate() {
        let mv = m.mul_vec(v);
        let r = mv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if r > limit {
            return Err(Error::ResidualTooLarge {
                index,
                residual: r,
                limit,
            });
        }
    }
    Ok(EigenPairs {
        spectrum: Spectrum { values, tol },
        vectors,
    })
}

/// All eigenvalues of a Hermitian matrix.
///
/// The matrix is reduced natively in complex arithmetic to a real
/// tridiagonal matrix, so each eigenvalue is returned once with its true
/// multiplicity; no doubling or deduplication is involved.
pub fn eig_hermitian(h: &HermitianMatrix, tol: f64) -> Result<Spectrum> {
    let values = eigen::eigenvalues(h.n(), h.as_dense().clone().into_vec())?;
    Ok(Spectrum { values, tol })
}

/// Eigenpairs of a Hermitian matrix with the same residual contract as
/// [`eig_symmetric_vectors`].
pub fn eig_hermitian_vectors(h: &HermitianMatrix, tol: f64) -> Result<EigenPairs<Complex64>> {
    let (values, vectors) = eigen::eigenpairs(h.n(), h.as_dense().clone().into_vec())?;
    let limit = tol * h.frobenius_norm();
    for (index, (lambda, v)) in values.iter().zip(&vectors).enumerate() {
        let hv = h.mul_vec(v);
        let r = hv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - b * lambda).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if r > limit {
            return Err(Error::ResidualTooLarge {
                index,
                residual: r,
                limit,
            });
        }
    }
    Ok(EigenPairs {
        spectrum: Spectrum { values, tol },
        vectors,
    })
}

/// Matrices with a real spectrum.
pub trait SelfAdjoint {
    fn spectrum(&self, tol: f64) -> Result<Spectrum>;
}

impl SelfAdjoint for RealMatrix {
    fn spectrum(&self, tol: f64) -> Result<Spectrum> {
        eig_symmetric(self, tol)
    }
}

impl SelfAdjoint for HermitianMatrix {
    fn spectrum(&self, tol: f64) -> Result<Spectrum> {
        eig_hermitian(self, tol)
    }
}

/// `max |λ|`.
pub fn spectral_radius<M: SelfAdjoint + ?Sized>(m: &M) -> Result<f64> {
    Ok(m.spectrum(DEFAULT_TOL)?.max_abs())
}

/// `|x^T M x| / x^T x`.
pub fn rayleigh_quotient(m: &RealMatrix, x: &[f64]) -> Result<f64> {
    let xx: f64 = x.iter().map(|v| v * v).sum();
    if xx == 0.0 {
        return Err(Error::invalid("Rayleigh quotient of the zero vector"));
    }
    let mx = m.mul_vec(x);
    let xmx: f64 = x.iter().zip(&mx).map(|(a, b)| a * b).sum();
    Ok(xmx.abs() / xx)
}

/// `|x* H x| / x* x` for complex `x`.
pub fn rayleigh_quotient_hermitian(h: &HermitianMatrix, x: &[Complex64]) -> Result<f64> {
    let xx = cdot(x, x).re;
    if xx == 0.0 {
        return Err(Error::invalid("Rayleigh quotient of the zero vector"));
    }
    Ok(cdot(x, &h.mul_vec(x)).norm() / xx)
}

/// Lift eigenvalues partitioned into those inherited from the base (old)
/// and the rest (new).
#[derive(Clone, Debug, PartialEq)]
pub struct OldNewSplit {
    /// Lift eigenvalues matched to base eigenvalues, in base order.
    pub old: Vec<f64>,
    /// Unmatched lift eigenvalues, descending.
    pub new: Vec<f64>,
    /// Largest new eigenvalue in absolute value.
    pub lambda_new: f64,
}

impl OldNewSplit {
    /// Largest new eigenvalue (signed).
    pub fn top_new(&self) -> f64 {
        self.new.first().copied().unwrap_or(f64::NAN)
    }
}

/// Greedy nearest-match split of a lift spectrum.
///
/// Base eigenvalues are taken in descending order; each claims the nearest
/// unused lift eigenvalue within `window`, ties going to the lower lift
/// index. Everything left over is new.
pub fn split_old_new(base: &Spectrum, lift: &Spectrum, k: usize, window: f64) -> Result<OldNewSplit> {
    if lift.len() != k * base.len() {
        return Err(Error::invalid(format!(
            "lift spectrum has {} values, expected {} * {}",
            lift.len(),
            k,
            base.len()
        )));
    }
    let lv = lift.values();
    let mut used = vec![false; lv.len()];
    let mut old = Vec::with_capacity(base.len());
    for &b in base.values() {
        // lv is descending: [0, pos) are >= b, [pos, len) are < b.
        let pos = lv.partition_point(|&x| x >= b);
        let left = (0..pos).rev().take_while(|&i| lv[i] - b <= window).find(|&i| !used[i]);
        let right = (pos..lv.len()).take_while(|&i| b - lv[i] <= window).find(|&i| !used[i]);
        let pick = match (left, right) {
            (Some(l), Some(r)) => {
                if (lv[r] - b).abs() < (lv[l] - b).abs() {
                    r
                } else {
                    l
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => return Err(Error::MatchingFailure { value: b, window }),
        };
        used[pick] = true;
        old.push(lv[pick]);
    }
    let new: Vec<f64> = lv.iter().zip(&used).filter(|(_, &u)| !u).map(|(&x, _)| x).collect();
    let lambda_new = new.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    Ok(OldNewSplit { old, new, lambda_new })
}

/// Largest nontrivial eigenvalue in absolute value of a d-regular adjacency
/// spectrum: one copy of `d` is dropped, and with `bipartite` set one copy
/// of `-d` as well.
pub fn lambda_nontrivial(s: &Spectrum, d: usize, bipartite: bool) -> Result<f64> {
    let d = d as f64;
    let vals = s.values();
    if vals.is_empty() || (vals[0] - d).abs() > MATCH_WINDOW {
        return Err(Error::invalid(format!(
            "top eigenvalue {:?} is not the degree {d}",
            vals.first()
        )));
    }
    let mut rest = &vals[1..];
    if bipartite {
        match rest.last() {
            Some(&low) if (low + d).abs() <= MATCH_WINDOW => rest = &rest[..rest.len() - 1],
            _ => {
                return Err(Error::invalid(format!(
                    "bipartite flag set but -{d} is not an eigenvalue"
                )))
            }
        }
    }
    Ok(rest.iter().fold(0.0, |m: f64, x| m.max(x.abs())))
}
