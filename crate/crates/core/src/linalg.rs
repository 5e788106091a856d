//! Dense symmetric eigensolvers.
//!
//! Two routines live here. [`jacobi`] is a cyclic Jacobi solver returning
//! eigenvalues and eigenvectors; it serves the small covariance matrices of
//! the PCA step. [`symmetric_eigenvalues`] is a Householder tridiagonal
//! reduction followed by implicit QL, eigenvalues only, used for graph
//! Laplacians where n reaches the low thousands.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
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

    /// Builds a matrix from equally sized rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Input("matrix rows have unequal lengths".into()));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Input(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out[(r, c)] += a * other[(k, c)];
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute difference between `self` and its transpose.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in (r + 1)..self.cols.min(self.rows) {
                worst = worst.max((self[(r, c)] - self[(c, r)]).abs());
            }
        }
        worst
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// Relative off-diagonal threshold at which Jacobi sweeps stop.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
/// Sweep cap for [`jacobi`].
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns unsorted eigenvalues and a matrix whose columns are the matching
/// unit eigenvectors. Rotations are skipped for entries that are exactly
/// zero, so a coordinate decoupled from the rest of the matrix keeps an
/// exact unit eigenvector.
pub fn jacobi(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !a.is_square() {
        return Err(Error::Input(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let norm = a.frobenius_norm();
    if !norm.is_finite() {
        return Err(Error::Numeric("matrix contains non-finite entries".into()));
    }
    let threshold = JACOBI_TOLERANCE * norm;

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&m) <= threshold {
            let values = (0..n).map(|i| m[(i, i)]).collect();
            return Ok((values, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    Err(Error::Numeric(format!(
        "Jacobi iteration did not converge within {JACOBI_MAX_SWEEPS} sweeps"
    )))
}

fn off_diagonal_norm(m: &Matrix) -> f64 {
    let mut sum = 0.0;
    for r in 0..m.rows {
        for c in 0..m.cols {
            if r != c {
                sum += m[(r, c)] * m[(r, c)];
            }
        }
    }
    sum.sqrt()
}

/// Eigenvalues of a symmetric matrix, ascending.
///
/// Only the lower triangle of `a` is read.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::Input(format!(
            "eigenvalues need a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut packed = a.data.clone();
    let (mut d, mut e) = tridiagonalize(&mut packed, n);
    tridiagonal_ql(&mut d, &mut e)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Householder reduction of the lower triangle of the row-major `n x n`
/// matrix `a` to tridiagonal form. Returns (diagonal, sub-diagonal) where
/// `e[i]` couples rows `i - 1` and `i`, and `e[0] = 0`.
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let mut p = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let (upper, lower) = a.split_at_mut(i * n);
        let u = &mut lower[..i];
        if l == 0 {
            e[i] = u[0];
            continue;
        }
        let scale: f64 = u.iter().map(|x| x.abs()).sum();
        if scale == 0.0 {
            e[i] = u[l];
            continue;
        }
        let mut h = 0.0;
        for x in u.iter_mut() {
            *x /= scale;
            h += *x * *x;
        }
        let f = u[l];
        let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
        e[i] = scale * g;
        h -= f * g;
        u[l] = f - g;

        // p = A u / h using only the lower triangle of rows 0..=l.
        let p = &mut p[..i];
        p.iter_mut().for_each(|x| *x = 0.0);
        for j in 0..i {
            let row = &upper[j * n..j * n + j + 1];
            let uj = u[j];
            let mut dot = 0.0;
            for k in 0..j {
                dot += row[k] * u[k];
                p[k] += row[k] * uj;
            }
            p[j] += dot + row[j] * uj;
        }
        let mut f_acc = 0.0;
        for j in 0..i {
            p[j] /= h;
            f_acc += p[j] * u[j];
        }
        let hh = f_acc / (h + h);
        for j in 0..i {
            p[j] -= hh * u[j];
        }
        // A -= u p^T + p u^T on the lower triangle.
        for j in 0..i {
            let (fj, gj) = (u[j], p[j]);
            let row = &mut upper[j * n..j * n + j + 1];
            for k in 0..=j {
                row[k] -= fj * p[k] + gj * u[k];
            }
        }
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[i * n + i];
    }
    (d, e)
}

const QL_MAX_ITERATIONS: usize = 64;

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal
/// matrix. On return `d` holds the eigenvalues (unsorted).
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > QL_MAX_ITERATIONS {
                return Err(Error::Numeric(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for r in 0..n {
            for c in 0..=r {
                let x = rng.gen_range(-5.0..5.0);
                m[(r, c)] = x;
                m[(c, r)] = x;
            }
        }
        m
    }

    #[test]
    fn jacobi_diagonal_is_fixed_point() {
        let m = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let (values, vectors) = jacobi(&m).unwrap();
        assert_eq!(values, vec![2.0, 1.0]);
        assert_eq!(vectors, Matrix::identity(2));
    }

    #[test]
    fn jacobi_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..9 {
            let a = random_symmetric(n, &mut rng);
            let (values, v) = jacobi(&a).unwrap();
            let mut d = Matrix::zeros(n, n);
            for i in 0..n {
                d[(i, i)] = values[i];
            }
            let rebuilt = v.matmul(&d).unwrap().matmul(&v.transpose()).unwrap();
            for r in 0..n {
                for c in 0..n {
                    assert!((rebuilt[(r, c)] - a[(r, c)]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn tridiagonal_ql_matches_jacobi() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 3, 5, 17, 40] {
            let a = random_symmetric(n, &mut rng);
            let mut expected = jacobi(&a).unwrap().0;
            expected.sort_by(f64::total_cmp);
            let got = symmetric_eigenvalues(&a).unwrap();
            for (x, y) in got.iter().zip(&expected) {
                assert!((x - y).abs() < 1e-9, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        let (values, _) = jacobi(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(values, vec![0.0; 3]);
        assert_eq!(
            symmetric_eigenvalues(&Matrix::zeros(3, 3)).unwrap(),
            vec![0.0; 3]
        );
    }

    #[test]
    fn non_square_is_rejected() {
        assert!(matches!(jacobi(&Matrix::zeros(2, 3)), Err(Error::Input(_))));
        assert!(matches!(
            symmetric_eigenvalues(&Matrix::zeros(3, 2)),
            Err(Error::Input(_))
        ));
    }
}
