//! Minimal dense linear algebra for small symmetric problems.
//!
//! Everything here operates on matrices of order at most a few dozen
//! (2N quadratures with N <= ~16), so simple O(n^3) algorithms with
//! good numerical behaviour beat pulling in a full linear-algebra stack:
//! Cholesky for SPD solves/inverses/determinants and cyclic Jacobi for
//! symmetric eigendecompositions.

use crate::error::{numeric, Result};
use crate::math;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut worst = 0.0f64;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            worst = worst.max((a - b).abs());
        }
        worst
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn scale(&self, s: f64) -> Matrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= s;
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// Fails with `NumericFailure` on a non-positive pivot.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 {
                    return Err(numeric(format!(
                        "non-positive pivot {s:e} at row {i}; matrix not positive definite"
                    )));
                }
                l[(i, j)] = math::sqrt(s);
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Ok(l)
}

/// Solves L z = v by forward substitution (L lower triangular).
pub fn forward_substitute(l: &Matrix, v: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut z = vec![0.0; n];
    for i in 0..n {
        let mut s = v[i];
        for k in 0..i {
            s -= l[(i, k)] * z[k];
        }
        z[i] = s / l[(i, i)];
    }
    z
}

/// v^T A^{-1} v for SPD `a`, via its Cholesky factor: |L^{-1} v|^2.
pub fn quad_form_inv(a: &Matrix, v: &[f64]) -> Result<f64> {
    let l = cholesky(a)?;
    let z = forward_substitute(&l, v);
    Ok(z.iter().map(|x| x * x).sum())
}

/// Determinant of SPD `a` as the squared product of Cholesky pivots.
pub fn det_spd(a: &Matrix) -> Result<f64> {
    let l = cholesky(a)?;
    let mut d = 1.0;
    for i in 0..a.rows {
        d *= l[(i, i)];
    }
    Ok(d * d)
}

/// Inverse of SPD `a` via Cholesky (solves for each unit vector).
pub fn inverse_spd(a: &Matrix) -> Result<Matrix> {
    let n = a.rows;
    let l = cholesky(a)?;
    let mut inv = Matrix::zeros(n, n);
    for col in 0..n {
        let mut e = vec![0.0; n];
        e[col] = 1.0;
        let z = forward_substitute(&l, &e);
        // back substitution with L^T
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = z[i];
            for k in (i + 1)..n {
                s -= l[(k, i)] * x[k];
            }
            x[i] = s / l[(i, i)];
        }
        for row in 0..n {
            inv[(row, col)] = x[row];
        }
    }
    // symmetrize away round-off
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (inv[(i, j)] + inv[(j, i)]);
            inv[(i, j)] = m;
            inv[(j, i)] = m;
        }
    }
    Ok(inv)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns (eigenvalues, eigenvectors-as-columns) with A = V D V^T.
pub fn jacobi_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m[(i, j)].abs());
            }
        }
        if off < 1e-14 * (1.0 + diag_scale(&m)) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::hypot(theta, 1.0))
                } else {
                    -1.0 / (-theta + math::hypot(theta, 1.0))
                };
                let c = 1.0 / math::hypot(t, 1.0);
                let s = t * c;
                // rotate rows/cols p and q
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eig = (0..n).map(|i| m[(i, i)]).collect();
    (eig, v)
}

fn diag_scale(m: &Matrix) -> f64 {
    let mut s = 0.0f64;
    for i in 0..m.rows {
        s = s.max(m[(i, i)].abs());
    }
    s
}

/// Symmetric square root of an SPD matrix via Jacobi.
pub fn sqrt_spd(a: &Matrix) -> Result<Matrix> {
    let (eig, v) = jacobi_eigen(a);
    let n = a.rows;
    if eig.iter().any(|&e| e <= 0.0) {
        return Err(numeric(format!(
            "matrix square root needs positive eigenvalues, got min {:e}",
            eig.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = math::sqrt(eig[i]);
    }
    Ok(v.matmul(&d).matmul(&v.transpose()))
}

/// Standard symplectic form Omega in interleaved (x1,p1,...,xN,pN) ordering:
/// block-diagonal [[0,1],[-1,0]] per mode.
pub fn symplectic_form(n_modes: usize) -> Matrix {
    let mut omega = Matrix::zeros(2 * n_modes, 2 * n_modes);
    for m in 0..n_modes {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    omega
}

/// Symplectic eigenvalues of an SPD covariance matrix: the positive
/// eigenvalue pairs of K = sigma^{1/2} Omega sigma^{1/2}, extracted as the
/// square roots of the (doubled) eigenvalues of K^T K.
pub fn symplectic_eigenvalues(sigma: &Matrix) -> Result<Vec<f64>> {
    let n2 = sigma.rows;
    assert_eq!(n2 % 2, 0);
    let root = sqrt_spd(sigma)?;
    let omega = symplectic_form(n2 / 2);
    let k = root.matmul(&omega).matmul(&root);
    let ktk = k.transpose().matmul(&k);
    let (mut eig, _) = jacobi_eigen(&ktk);
    eig.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    // eigenvalues come in duplicated pairs nu_i^2
    let mut nus = Vec::with_capacity(n2 / 2);
    for i in 0..n2 / 2 {
        let pair = 0.5 * (eig[2 * i] + eig[2 * i + 1]);
        nus.push(math::sqrt(pair.max(0.0)));
    }
    Ok(nus)
}
