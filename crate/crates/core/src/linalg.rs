//! Small dense complex matrices.
//!
//! Spectral matrices are at most a few dozen rows, so everything here is a
//! straightforward row-major `Vec` with O(n^3) kernels.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Builds a matrix from rows. Panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { n, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    /// `v * v^H`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn diagonal(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.n).map(move |i| self[(i, i)])
    }

    /// Mean of the real parts of the diagonal.
    pub fn mean_diagonal(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        self.diagonal().map(|z| z.re).sum::<f64>() / self.n as f64
    }

    pub fn add_to_diagonal(&mut self, shift: f64) {
        for i in 0..self.n {
            self[(i, i)].re += shift;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|a_ij - conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Replaces the matrix by `(A + A^H) / 2`, making it exactly Hermitian.
    pub fn hermitianize(&mut self) {
        for i in 0..self.n {
            self[(i, i)].im = 0.0;
            for j in (i + 1)..self.n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }

    /// Induced 1-norm (max column sum of moduli).
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)];
            }
        }
        m
    }

    /// Inverse of a Hermitian positive-definite matrix through its Cholesky
    /// factor. Only the lower triangle is read. Returns `None` when a pivot is
    /// not safely positive.
    pub fn cholesky_inverse(&self) -> Option<Self> {
        let n = self.n;
        let l = self.cholesky()?;

        // Invert the lower-triangular factor column by column.
        let mut linv = Self::zeros(n);
        for j in 0..n {
            linv[(j, j)] = ONE / l[(j, j)];
            for i in (j + 1)..n {
                let mut acc = ZERO;
                for k in j..i {
                    acc += l[(i, k)] * linv[(k, j)];
                }
                linv[(i, j)] = -acc / l[(i, i)];
            }
        }

        // A^-1 = L^-H L^-1
        let mut inv = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut acc = ZERO;
                for k in i..n {
                    acc += linv[(k, i)].conj() * linv[(k, j)];
                }
                inv[(i, j)] = acc;
                inv[(j, i)] = acc.conj();
            }
            inv[(i, i)].im = 0.0;
        }
        Some(inv)
    }

    fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let scale = self.diagonal().map(|z| z.re.abs()).fold(0.0, f64::max);
        if !(scale > 0.0) || !scale.is_finite() {
            return None;
        }
        let floor = scale * f64::EPSILON * n as f64;
        let mut l = Self::zeros(n);
        for j in 0..n {
            let mut diag = self[(j, j)].re;
            for k in 0..j {
                diag -= l[(j, k)].norm_sqr();
            }
            if !(diag > floor) {
                return None;
            }
            let ljj = libm::sqrt(diag);
            l[(j, j)] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut acc = self[(i, j)];
                for k in 0..j {
                    acc -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = acc / ljj;
            }
        }
        Some(l)
    }

    /// Solves `self * X = rhs` by Gaussian elimination with partial pivoting.
    /// `rhs` is `n x m`, stored as rows. Returns `None` for a (numerically)
    /// singular system.
    pub fn solve(&self, rhs: &[Vec<Complex64>]) -> Option<Vec<Vec<Complex64>>> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let m = rhs.first().map_or(0, Vec::len);
        let mut a = self.data.clone();
        let mut b: Vec<Vec<Complex64>> = rhs.to_vec();
        let tol = self.max_abs() * f64::EPSILON * (n.max(1) as f64) * 16.0;
        if n > 0 && !(tol > 0.0) {
            return None;
        }
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_abs > tol) {
                return None;
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                b.swap(col, pivot_row);
            }
            let pivot = a[col * n + col];
            for r in (col + 1)..n {
                let factor = a[r * n + col] / pivot;
                if factor == ZERO {
                    continue;
                }
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= factor * v;
                }
                for k in 0..m {
                    let v = b[col][k];
                    b[r][k] -= factor * v;
                }
            }
        }
        let mut x = vec![vec![ZERO; m]; n];
        for r in (0..n).rev() {
            for k in 0..m {
                let mut acc = b[r][k];
                for c in (r + 1)..n {
                    acc -= a[r * n + c] * x[c][k];
                }
                x[r][k] = acc / a[r * n + r];
            }
        }
        Some(x)
    }

    /// Determinant by LU with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        let n = self.n;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r, &s| a[r * n + col].norm().total_cmp(&a[s * n + col].norm()))
                .unwrap_or(col);
            let pivot = a[pivot_row * n + col];
            if pivot == ZERO {
                return ZERO;
            }
            if pivot_row != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot_row * n + k);
                }
                det = -det;
            }
            det *= pivot;
            for r in (col + 1)..n {
                let factor = a[r * n + col] / pivot;
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= factor * v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cholesky_inverse_of_hermitian() {
        let a = CMatrix::from_rows(&[
            vec![c(4.0, 0.0), c(1.0, 2.0), c(0.0, -1.0)],
            vec![c(1.0, -2.0), c(6.0, 0.0), c(0.5, 0.5)],
            vec![c(0.0, 1.0), c(0.5, -0.5), c(3.0, 0.0)],
        ]);
        let inv = a.cholesky_inverse().unwrap();
        let prod = inv.mul(&a).sub(&CMatrix::identity(3));
        assert!(prod.max_abs() < 1e-14);
        assert_eq!(inv.hermitian_deviation(), 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite_and_singular() {
        let indefinite = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(indefinite.cholesky_inverse().is_none());
        let rank_one = CMatrix::outer(&[c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(rank_one.cholesky_inverse().is_none());
        assert!(CMatrix::zeros(2).cholesky_inverse().is_none());
    }

    #[test]
    fn solve_matches_multiplication() {
        let a = CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(2.0, 1.0)],
            vec![c(1.0, 0.0), c(3.0, -1.0)],
        ]);
        let x = a.solve(&[vec![c(1.0, 0.0)], vec![c(0.0, 1.0)]]).unwrap();
        let r0 = a[(0, 0)] * x[0][0] + a[(0, 1)] * x[1][0];
        let r1 = a[(1, 0)] * x[0][0] + a[(1, 1)] * x[1][0];
        assert!((r0 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((r1 - c(0.0, 1.0)).norm() < 1e-15);
        assert!(CMatrix::zeros(2).solve(&[vec![ONE], vec![ONE]]).is_none());
    }

    #[test]
    fn determinant_of_outer_product_vanishes() {
        let m = CMatrix::outer(&[c(1.0, 2.0), c(-0.5, 0.3), c(2.0, -1.0)]);
        assert!(m.determinant().norm() < 1e-12);
        let d = CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((d.determinant() - c(3.0, 0.0)).norm() < 1e-15);
    }
}
