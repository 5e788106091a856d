//! Principal component extraction over the per-percentage metric matrices.
//!
//! Each matrix `A_p` (configurations × metrics) yields a sample covariance
//! matrix; the matrices are averaged, decomposed, and the leading eigenvector
//! is rescaled so the intact network's metric vector scores exactly 1.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Default share of total variance the retained components must reach.
pub const DEFAULT_ALPHA: f64 = 0.9;

/// Largest matrix dimension accepted by [`eigen_symmetric`].
pub const MAX_EIGEN_DIM: usize = 4096;

/// Tolerated asymmetry, relative to the matrix norm.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Sample covariance matrix of the columns of a data matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix(Matrix);

impl CovarianceMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// `cov(col_i, col_j)` with the unbiased `m - 1` denominator.
pub fn covariance(a: &Matrix) -> Result<CovarianceMatrix> {
    let (m, n) = (a.rows(), a.cols());
    if m < 2 {
        return Err(Error::Domain(format!(
            "covariance needs at least 2 observations, got {m}"
        )));
    }
    // Shifting by the first row keeps constant columns exactly zero.
    let shift = a.row(0).to_vec();
    let mut means = vec![0.0; n];
    for r in 0..m {
        for (c, mean) in means.iter_mut().enumerate() {
            *mean += a[(r, c)] - shift[c];
        }
    }
    means.iter_mut().for_each(|x| *x /= m as f64);

    let mut cov = Matrix::zeros(n, n);
    let mut centred = vec![0.0; n];
    for r in 0..m {
        for c in 0..n {
            centred[c] = a[(r, c)] - shift[c] - means[c];
        }
        for i in 0..n {
            for j in 0..=i {
                cov[(i, j)] += centred[i] * centred[j];
            }
        }
    }
    let denom = (m - 1) as f64;
    for i in 0..n {
        for j in 0..=i {
            let v = cov[(i, j)] / denom;
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    Ok(CovarianceMatrix(cov))
}

/// Entrywise mean of equally sized covariance matrices.
pub fn mean_covariance(matrices: &[CovarianceMatrix]) -> Result<CovarianceMatrix> {
    let first = matrices
        .first()
        .ok_or_else(|| Error::Input("no covariance matrices to average".into()))?;
    let n = first.dim();
    if let Some(bad) = matrices.iter().find(|c| c.dim() != n) {
        return Err(Error::Input(format!(
            "covariance dimensions differ: {n} vs {}",
            bad.dim()
        )));
    }
    let mut mean = Matrix::zeros(n, n);
    for c in matrices {
        for i in 0..n {
            for j in 0..n {
                mean[(i, j)] += c.0[(i, j)];
            }
        }
    }
    let k = matrices.len() as f64;
    for i in 0..n {
        for j in 0..n {
            mean[(i, j)] /= k;
        }
    }
    Ok(CovarianceMatrix(mean))
}

/// Eigenpairs of a symmetric matrix sorted by decreasing eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Matrix,
}

/// Symmetric eigendecomposition with eigenvalues and eigenvector columns
/// sorted together in decreasing order. Each eigenvector is oriented so its
/// largest-magnitude component is positive.
pub fn eigen_symmetric(c: &Matrix) -> Result<SymmetricEigen> {
    if !c.is_square() {
        return Err(Error::Input(
            "eigendecomposition needs a square matrix".into(),
        ));
    }
    if c.rows() > MAX_EIGEN_DIM {
        return Err(Error::Input(format!(
            "matrix dimension {} exceeds the configured bound {MAX_EIGEN_DIM}",
            c.rows()
        )));
    }
    let asymmetry = c.asymmetry();
    if asymmetry > SYMMETRY_TOLERANCE * (1.0 + c.frobenius_norm()) {
        return Err(Error::Input(format!(
            "matrix is not symmetric (max |c_ij - c_ji| = {asymmetry:e})"
        )));
    }
    let (values, raw) = linalg::jacobi(c)?;
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut vectors = Matrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        let column = raw.column(src);
        let pivot = column
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for (r, x) in column.iter().enumerate() {
            vectors[(r, k)] = sign * x;
        }
    }
    Ok(SymmetricEigen {
        values: order.iter().map(|&i| values[i]).collect(),
        vectors,
    })
}

/// Cumulative eigenvalue energy: `g[j] = D[0] + ... + D[j]`.
pub fn energy_quantum(eigenvalues: &[f64]) -> Vec<f64> {
    eigenvalues
        .iter()
        .scan(0.0, |acc, &d| {
            *acc += d;
            Some(*acc)
        })
        .collect()
}

/// Smallest component count `l` (1-based) whose energy share reaches `alpha`.
pub fn select_l(energy: &[f64], alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Config(format!(
            "alpha must lie in (0, 1], got {alpha}"
        )));
    }
    let total = *energy
        .last()
        .ok_or_else(|| Error::Input("empty energy sequence".into()))?;
    if total.is_nan() || total <= 0.0 {
        return Err(Error::DegenerateData(format!(
            "total variance is {total}; no principal direction exists"
        )));
    }
    // Ratios are clamped so rounding in the last partial sum cannot skip past n.
    Ok(energy
        .iter()
        .position(|&g| (g / total).min(1.0) >= alpha || g >= total)
        .map_or(energy.len(), |i| i + 1))
}

/// Rescales `v` so that `Σ t0_k v̂_k = 1`. `v` is first flipped, if needed,
/// so that `Σ t0_k v_k > 0`.
pub fn normalize_pc(v: &[f64], t0: &[f64]) -> Result<Vec<f64>> {
    if v.len() != t0.len() {
        return Err(Error::Input(format!(
            "eigenvector has {} entries but the metric vector has {}",
            v.len(),
            t0.len()
        )));
    }
    let denom: f64 = v.iter().zip(t0).map(|(a, b)| a * b).sum();
    if denom.abs() <= 1e-12 || !denom.is_finite() {
        return Err(Error::DegenerateData(format!(
            "cannot normalize principal component: t0·v = {denom:e} (t0 = {t0:?}, v = {v:?})"
        )));
    }
    let oriented: Vec<f64> = if denom < 0.0 {
        v.iter().map(|x| -x).collect()
    } else {
        v.to_vec()
    };
    let denom = denom.abs();
    Ok(oriented.iter().map(|x| x / denom).collect())
}

/// The fitted principal-component model of one scenario run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub metric_names: Vec<String>,
    /// Sorted descending.
    pub eigenvalues: Vec<f64>,
    /// One unit eigenvector per eigenvalue, same order.
    pub eigenvectors: Vec<Vec<f64>>,
    pub energy: Vec<f64>,
    pub alpha: f64,
    /// Component count reaching `alpha`. Only the first component is used.
    pub selected_components: usize,
    /// Leading eigenvector, oriented so `Σ t0_k v_k > 0`.
    pub principal: Vec<f64>,
    pub normalized: Vec<f64>,
    pub t0: Vec<f64>,
}

impl PcaModel {
    /// Runs covariance averaging, eigendecomposition, component selection and
    /// normalization against the intact metric vector `t0`.
    pub fn fit(
        covariances: &[CovarianceMatrix],
        t0: &[f64],
        metric_names: &[&str],
        alpha: f64,
    ) -> Result<PcaModel> {
        let mean = mean_covariance(covariances)?;
        if mean.dim() != t0.len() {
            return Err(Error::Input(format!(
                "covariance is {0}x{0} but t0 has {1} entries",
                mean.dim(),
                t0.len()
            )));
        }
        let eig = eigen_symmetric(mean.matrix())?;
        let energy = energy_quantum(&eig.values);
        let selected = select_l(&energy, alpha).map_err(|e| match e {
            Error::DegenerateData(msg) => Error::DegenerateData(format!(
                "{msg}; the metrics did not vary across configurations, \
                 increase the configuration count or the failure percentages"
            )),
            other => other,
        })?;
        if selected > 1 {
            let total = energy[energy.len() - 1];
            let ratios: Vec<String> = energy.iter().map(|g| format!("{:.4}", g / total)).collect();
            warn!(
                "{selected} components are needed to reach alpha = {alpha} \
                 (energy ratios [{}]); continuing with the first component only",
                ratios.join(", ")
            );
        }
        let principal_raw = eig.vectors.column(0);
        let normalized = normalize_pc(&principal_raw, t0)?;
        let dot: f64 = principal_raw.iter().zip(t0).map(|(a, b)| a * b).sum();
        let principal = if dot < 0.0 {
            principal_raw.iter().map(|x| -x).collect()
        } else {
            principal_raw
        };
        Ok(PcaModel {
            metric_names: metric_names.iter().map(|s| s.to_string()).collect(),
            eigenvectors: (0..eig.values.len())
                .map(|k| eig.vectors.column(k))
                .collect(),
            eigenvalues: eig.values,
            energy,
            alpha,
            selected_components: selected,
            principal,
            normalized,
            t0: t0.to_vec(),
        })
    }

    /// `Σ v̂_k t0_k`, which is 1 up to rounding.
    pub fn initial_robustness(&self) -> f64 {
        self.normalized
            .iter()
            .zip(&self.t0)
            .map(|(v, t)| v * t)
            .sum()
    }
}
