//! Dense self-adjoint eigensolver.
//!
//! Householder reduction to a real symmetric tridiagonal matrix followed by
//! implicit-shift QL iteration. The reduction is written once over
//! [`Scalar`] and serves both real symmetric and complex Hermitian input:
//! a Hermitian matrix reduces to a complex Hermitian tridiagonal form whose
//! off-diagonal phases are then absorbed into a unimodular diagonal
//! similarity, leaving a real tridiagonal matrix with identical eigenvalues.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_ITERATIONS: usize = 60;

pub(crate) trait Scalar:
    Copy
    + Default
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
{
    fn conj(self) -> Self;
    fn norm_sqr(self) -> f64;
    fn re(self) -> f64;
    fn from_re(x: f64) -> Self;
    fn scale(self, s: f64) -> Self;

    /// `self / |self|`, or one for zero.
    fn unit_phase(self) -> Self {
        let r = self.norm_sqr().sqrt();
        if r == 0.0 {
            Self::from_re(1.0)
        } else {
            self.scale(1.0 / r)
        }
    }
}

impl Scalar for f64 {
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn from_re(x: f64) -> Self {
        x
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn from_re(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

/// Real symmetric tridiagonal form plus what is needed to map its
/// eigenvectors back to the original basis.
struct Tridiagonal<T> {
    diag: Vec<f64>,
    /// `sub[i]` couples `i - 1` and `i`; `sub[0]` is unused.
    sub: Vec<f64>,
    /// Reflector `i` lives in the first `i` entries of row `i`.
    reflectors: Vec<T>,
    tau: Vec<f64>,
    phase: Vec<T>,
}

/// Reduces the self-adjoint matrix whose lower triangle is stored row-major
/// in `a` (upper triangle ignored).
fn tridiagonalize<T: Scalar>(n: usize, mut a: Vec<T>) -> Tridiagonal<T> {
    let mut sub = vec![0.0; n];
    let mut tau = vec![0.0; n];
    let mut beta = vec![T::from_re(0.0); n];
    let mut p = vec![T::default(); n];

    for i in (1..n).rev() {
        let (head, tail) = a.split_at_mut(i * n);
        let v = &mut tail[..i];
        let last = i - 1;
        // Column i above the diagonal, y = conj(row i).
        for x in v.iter_mut() {
            *x = x.conj();
        }
        // Scaling keeps the squared norms clear of underflow when the
        // column is already tiny (highly degenerate spectra).
        let scale: f64 = v.iter().map(|x| x.norm_sqr().sqrt()).sum();
        if scale == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x = x.scale(1.0 / scale);
        }
        let off: f64 = v[..last].iter().map(|x| x.norm_sqr()).sum();
        if off == 0.0 {
            beta[i] = v[last];
            sub[i] = v[last].norm_sqr().sqrt() * scale;
            continue;
        }
        let y_last = v[last];
        let y_last_abs = y_last.norm_sqr().sqrt();
        let norm = (off + y_last.norm_sqr()).sqrt();
        let b = -(y_last.unit_phase().scale(norm));
        v[last] -= b;
        let t = 1.0 / (norm * norm + norm * y_last_abs);
        beta[i] = b;
        sub[i] = norm * scale;
        tau[i] = t;

        // p = t * B v with B the leading i x i block.
        let p = &mut p[..i];
        for x in p.iter_mut() {
            *x = T::default();
        }
        for j in 0..i {
            let row = &head[j * n..j * n + j + 1];
            let vj = v[j];
            let mut acc = row[j] * vj;
            for ((&bjk, &vk), pk) in row[..j].iter().zip(&v[..j]).zip(p[..j].iter_mut()) {
                acc += bjk * vk;
                *pk += bjk.conj() * vj;
            }
            p[j] += acc;
        }
        let mut vp = 0.0;
        for (x, vk) in p.iter_mut().zip(v.iter()) {
            *x = x.scale(t);
            vp += (vk.conj() * *x).re();
        }
        let k = 0.5 * t * vp;
        // q = p - k v, stored in p.
        for (x, &vk) in p.iter_mut().zip(v.iter()) {
            *x -= vk.scale(k);
        }
        // B -= v q* + q v*
        for j in 0..i {
            let row = &mut head[j * n..j * n + j + 1];
            let (vj, qj) = (v[j], p[j]);
            for ((bjk, &vk), &qk) in row.iter_mut().zip(&v[..=j]).zip(&p[..=j]) {
                *bjk -= vj * qk.conj() + qj * vk.conj();
            }
            row[j] = T::from_re(row[j].re());
        }
    }

    let diag = (0..n).map(|i| a[i * n + i].re()).collect();
    let mut phase = vec![T::from_re(1.0); n];
    for i in (1..n).rev() {
        phase[i - 1] = phase[i] * beta[i].unit_phase();
    }
    Tridiagonal {
        diag,
        sub,
        reflectors: a,
        tau,
        phase,
    }
}

impl<T: Scalar> Tridiagonal<T> {
    /// Maps an eigenvector of the real tridiagonal matrix back to the
    /// original basis.
    fn back_transform(&self, z: &[f64]) -> Vec<T> {
        let n = z.len();
        let mut w: Vec<T> = z.iter().zip(&self.phase).map(|(&zi, &ph)| ph.scale(zi)).collect();
        for i in 1..n {
            let t = self.tau[i];
            if t == 0.0 {
                continue;
            }
            let v = &self.reflectors[i * n..i * n + i];
            let mut s = T::default();
            for (&vk, &wk) in v.iter().zip(&w[..i]) {
                s += vk.conj() * wk;
            }
            let s = s.scale(t);
            for (wk, &vk) in w[..i].iter_mut().zip(v) {
                *wk -= vk * s;
            }
        }
        w
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix (`diag`, `sub` as
/// produced above). When `z` is given it holds one basis vector per row and
/// receives the accumulated rotations.
fn tridiagonal_ql(diag: &mut [f64], sub: &[f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    let d = diag;
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&sub[1..]);
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::NumericalFailure {
                        n,
                        index: l,
                        iterations: iter - 1,
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d[l + 2..].iter_mut() {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        let (lo, hi) = z.split_at_mut((i + 1) * n);
                        let zi = &mut lo[i * n..];
                        let zi1 = &mut hi[..n];
                        for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                            let h = *b;
                            *b = s * *a + c * h;
                            *a = c * *a - s * h;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigenvalues (descending) of the self-adjoint matrix stored row-major in
/// `data`; only the lower triangle is read.
pub(crate) fn eigenvalues<T: Scalar>(n: usize, data: Vec<T>) -> Result<Vec<f64>> {
    let tri = tridiagonalize(n, data);
    let mut d = tri.diag;
    tridiagonal_ql(&mut d, &tri.sub, None)?;
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

/// Eigenvalues (descending) with unit eigenvectors in matching order.
pub(crate) fn eigenpairs<T: Scalar>(n: usize, data: Vec<T>) -> Result<(Vec<f64>, Vec<Vec<T>>)> {
    let tri = tridiagonalize(n, data);
    let mut d = tri.diag.clone();
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    tridiagonal_ql(&mut d, &tri.sub, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| tri.back_transform(&z[i * n..(i + 1) * n]))
        .collect();
    Ok((values, vectors))
}
