//! Root-of-unity matrices of a shift lift and the check that their pooled
//! spectra reproduce the lift spectrum.
//!
//! For a shift assignment and a k-th root of unity `t`, `A_s(t)` carries
//! `t^Shift(u,v)` on every oriented edge. If `(α, v)` is an eigenpair of
//! `A_s(ω)` then the vector with entry `ω^i v_x` at lift vertex `(x, i)` is
//! an eigenvector of the lift with eigenvalue `α`, and such vectors built
//! from distinct roots are orthogonal. Running over all `k` roots therefore
//! accounts for the whole lift spectrum.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{adjacency_matrix, RegularGraph};
use crate::lift::{build_lift, shift_to_assignment, ShiftAssignment};
use crate::matrix::{cdot, cnorm, HermitianMatrix};
use crate::par::{map_indexed, Execution};
use crate::spectral::{eig_hermitian, eig_hermitian_vectors, eig_symmetric, Spectrum, MATCH_WINDOW};

/// Bound on inner products between lifted eigenvectors of distinct roots.
pub const ORTHOGONALITY_TOL: f64 = 1e-8;

/// `ω_k^j = exp(2πi j / k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootOfUnity {
    k: usize,
    j: usize,
}

impl RootOfUnity {
    pub fn new(k: usize, j: usize) -> Result<Self> {
        if k == 0 || j >= k {
            return Err(Error::invalid(format!("root index {j} not in 0..{k}")));
        }
        Ok(Self { k, j })
    }

    pub fn one(k: usize) -> Self {
        Self { k: k.max(1), j: 0 }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn value(&self) -> Complex64 {
        self.pow(1)
    }

    /// `value^e`, reduced mod k before evaluating so large powers stay exact
    /// on the unit circle.
    pub fn pow(&self, e: usize) -> Complex64 {
        let r = (self.j * e) % self.k;
        if r == 0 {
            return Complex64::new(1.0, 0.0);
        }
        Complex64::from_polar(1.0, TAU * r as f64 / self.k as f64)
    }
}

/// `A_s(t)`: `t^Shift(u,v)` at `(u, v)`, its conjugate at `(v, u)`.
pub fn shift_matrix(g: &RegularGraph, sa: &ShiftAssignment, t: RootOfUnity) -> Result<HermitianMatrix> {
    if sa.len() != g.edge_count() {
        return Err(Error::invalid(format!(
            "shift assignment covers {} edges, graph has {}",
            sa.len(),
            g.edge_count()
        )));
    }
    if t.k() != sa.k() {
        return Err(Error::invalid(format!(
            "root of order {} used with a {}-lift",
            t.k(),
            sa.k()
        )));
    }
    let mut h = HermitianMatrix::zeros(g.n());
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        h.set(u, v, t.pow(sa.shifts()[e]));
    }
    Ok(h)
}

/// Entry `(x, i)` (lift index `x * k + i`) equals `t^i v_x`.
pub fn lift_eigenvector(v: &[Complex64], t: RootOfUnity, k: usize) -> Result<Vec<Complex64>> {
    if t.k() != k {
        return Err(Error::invalid(format!("root of order {} used with k = {k}", t.k())));
    }
    if v.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(Error::invalid("zero vector is not an eigenvector"));
    }
    let powers: Vec<Complex64> = (0..k).map(|i| t.pow(i)).collect();
    Ok(v.iter().flat_map(|&vx| powers.iter().map(move |&w| w * vx)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSpectrum {
    pub j: usize,
    pub radius: f64,
    pub eigenvalues: Vec<f64>,
}

/// Outcome of checking a shift lift against its root-of-unity matrices.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterizationReport {
    pub k: usize,
    pub n: usize,
    pub tol: f64,
    /// Largest pairwise gap between pooled root spectra and lift spectrum.
    pub max_multiset_mismatch: f64,
    /// Largest `|A_H v^l - α v^l|` over all lifted eigenpairs (unit `v`).
    pub max_eigenvector_residual: f64,
    pub lift_frobenius_norm: f64,
    /// Largest `|<x^l, y^l>|` between unit lifted vectors of distinct roots.
    pub max_cross_root_inner_product: f64,
    /// `max_{j >= 1} ||A_s(ω^j)||`.
    pub lambda_new_from_roots: f64,
    pub pooled_spectrum: Vec<f64>,
    pub lift_spectrum: Vec<f64>,
    pub roots: Vec<RootSpectrum>,
}

impl CharacterizationReport {
    /// Residual relative to `|A_H|_F`.
    pub fn relative_residual(&self) -> f64 {
        if self.lift_frobenius_norm == 0.0 {
            0.0
        } else {
            self.max_eigenvector_residual / self.lift_frobenius_norm
        }
    }

    /// Returns the first failing check, if any.
    pub fn violation(&self) -> Option<Error> {
        let limit = self.tol * self.lift_frobenius_norm;
        if self.max_multiset_mismatch > MATCH_WINDOW {
            return Some(Error::CharacterizationViolation {
                check: "pooled spectrum mismatch",
                value: self.max_multiset_mismatch,
                limit: MATCH_WINDOW,
                detail: format!("k={}, n={}", self.k, self.n),
            });
        }
        if self.max_eigenvector_residual > limit {
            return Some(Error::CharacterizationViolation {
                check: "lifted eigenvector residual",
                value: self.max_eigenvector_residual,
                limit,
                detail: format!("k={}, n={}", self.k, self.n),
            });
        }
        if self.max_cross_root_inner_product > ORTHOGONALITY_TOL {
            return Some(Error::CharacterizationViolation {
                check: "cross-root inner product",
                value: self.max_cross_root_inner_product,
                limit: ORTHOGONALITY_TOL,
                detail: format!("k={}, n={}", self.k, self.n),
            });
        }
        None
    }
}

/// Computes every quantity of the characterization without judging it.
pub fn characterize(g: &RegularGraph, sa: &ShiftAssignment, tol: f64) -> Result<CharacterizationReport> {
    let k = sa.k();
    let lift = build_lift(g, &shift_to_assignment(sa))?;
    let a_h = adjacency_matrix(&lift.graph);
    let lift_spectrum = eig_symmetric(&a_h, tol)?;
    let frob = a_h.frobenius_norm();

    let per_root = map_indexed(Execution::Parallel, k, |j| -> Result<_> {
        let t = RootOfUnity::new(k, j)?;
        let h = shift_matrix(g, sa, t)?;
        let pairs = eig_hermitian_vectors(&h, tol)?;
        let mut lifted = Vec::with_capacity(pairs.vectors.len());
        let mut worst_residual: f64 = 0.0;
        for (alpha, v) in pairs.spectrum.values().iter().zip(&pairs.vectors) {
            let scale = 1.0 / cnorm(v);
            let unit: Vec<Complex64> = v.iter().map(|z| z * scale).collect();
            let vl = lift_eigenvector(&unit, t, k)?;
            let av: Vec<Complex64> = (0..vl.len())
                .map(|a| lift.graph.neighbors(a).iter().map(|&b| vl[b]).sum())
                .collect();
            let r = av
                .iter()
                .zip(&vl)
                .map(|(x, y)| (x - y * alpha).norm_sqr())
                .sum::<f64>()
                .sqrt();
            worst_residual = worst_residual.max(r);
            let norm = 1.0 / (k as f64).sqrt();
            lifted.push(vl.into_iter().map(|z| z * norm).collect::<Vec<_>>());
        }
        Ok((pairs.spectrum, worst_residual, lifted))
    });
    let per_root: Vec<_> = per_root.into_iter().collect::<Result<_>>()?;

    let mut pooled = Spectrum::new(Vec::new(), tol);
    let mut roots = Vec::with_capacity(k);
    let mut max_residual: f64 = 0.0;
    for (j, (spec, residual, _)) in per_root.iter().enumerate() {
        pooled = pooled.union(spec);
        max_residual = max_residual.max(*residual);
        roots.push(RootSpectrum {
            j,
            radius: spec.max_abs(),
            eigenvalues: spec.values().to_vec(),
        });
    }
    let mismatch = pooled.max_deviation(&lift_spectrum).unwrap_or(f64::INFINITY);

    let mut max_inner: f64 = 0.0;
    for j1 in 0..k {
        for j2 in j1 + 1..k {
            for x in &per_root[j1].2 {
                for y in &per_root[j2].2 {
                    max_inner = max_inner.max(cdot(x, y).norm());
                }
            }
        }
    }

    let lambda_new_from_roots = roots[1..].iter().fold(0.0, |m: f64, r| m.max(r.radius));
    Ok(CharacterizationReport {
        k,
        n: g.n(),
        tol,
        max_multiset_mismatch: mismatch,
        max_eigenvector_residual: max_residual,
        lift_frobenius_norm: frob,
        max_cross_root_inner_product: max_inner,
        lambda_new_from_roots,
        pooled_spectrum: pooled.values().to_vec(),
        lift_spectrum: lift_spectrum.values().to_vec(),
        roots,
    })
}

/// [`characterize`], failing with the worst offending check.
pub fn verify_characterization(g: &RegularGraph, sa: &ShiftAssignment, tol: f64) -> Result<CharacterizationReport> {
    let report = characterize(g, sa, tol)?;
    match report.violation() {
        Some(err) => Err(err),
        None => Ok(report),
    }
}

/// Spectral radii of `A_s(ω^j)` for every `j` in `0..k`.
pub fn root_radii(g: &RegularGraph, sa: &ShiftAssignment) -> Result<Vec<f64>> {
    (0..sa.k())
        .map(|j| {
            let h = shift_matrix(g, sa, RootOfUnity::new(sa.k(), j)?)?;
            Ok(eig_hermitian(&h, crate::spectral::DEFAULT_TOL)?.max_abs())
        })
        .collect()
}
