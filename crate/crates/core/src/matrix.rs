//! Small dense square matrices: real (symmetric by convention) and Hermitian.

use num_complex::Complex64;

/// Row-major dense `n x n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

pub type RealMatrix = DenseMatrix<f64>;

impl<T: Copy + Default> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::default(); n * n],
        }
    }

    /// Builds a matrix from row-major data. Panics if `data.len() != n * n`.
    pub fn from_row_major(n: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), n * n, "row-major data must hold n*n entries");
        Self { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.n + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub(crate) fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// `P M P^T` for the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(perm[i], perm[j], self.get(i, j));
            }
        }
        out
    }
}

impl RealMatrix {
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_cvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| b * a).sum())
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    /// Largest `|M[i][j] - M[j][i]|` together with its position.
    pub fn max_asymmetry(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.n {
            for j in 0..i {
                let dev = (self.get(i, j) - self.get(j, i)).abs();
                if dev > worst.0 {
                    worst = (dev, i, j);
                }
            }
        }
        worst
    }
}

/// Hermitian matrix over `(re, im)` pairs. Every write goes through
/// [`HermitianMatrix::set`], which mirrors the conjugate entry, so Hermitian
/// symmetry holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: DenseMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DenseMatrix::zeros(n),
        }
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        let n = m.n();
        let mut h = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                h.set(i, j, Complex64::new(m.get(i, j), 0.0));
            }
        }
        h
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    /// Sets entry `(i, j)` to `z` and `(j, i)` to `conj(z)`. Diagonal entries
    /// keep only the real part.
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        if i == j {
            self.inner.set(i, i, Complex64::new(z.re, 0.0));
        } else {
            self.inner.set(i, j, z);
            self.inner.set(j, i, z.conj());
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner.get(i, j)
    }

    pub fn as_dense(&self) -> &DenseMatrix<Complex64> {
        &self.inner
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n());
        (0..self.n())
            .map(|i| self.inner.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Real and imaginary parts as two real matrices (symmetric and
    /// antisymmetric respectively).
    pub fn split_parts(&self) -> (RealMatrix, RealMatrix) {
        let n = self.n();
        (
            RealMatrix::from_fn(n, |i, j| self.get(i, j).re),
            RealMatrix::from_fn(n, |i, j| self.get(i, j).im),
        )
    }
}

pub(crate) fn cdot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub(crate) fn cnorm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_set_mirrors_conjugate() {
        let mut h = HermitianMatrix::zeros(3);
        h.set(0, 2, Complex64::new(1.0, 2.0));
        h.set(1, 1, Complex64::new(3.0, 5.0));
        assert_eq!(h.get(2, 0), Complex64::new(1.0, -2.0));
        assert_eq!(h.get(1, 1), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn permuted_matches_reindexing() {
        let m = RealMatrix::from_fn(3, |i, j| (i * 3 + j) as f64);
        let p = m.permuted(&[2, 0, 1]);
        assert_eq!(p.get(2, 0), m.get(0, 1));
        assert_eq!(p.get(1, 1), m.get(2, 2));
    }
}
