//! Algebraic connectivity of connected graphs.
//!
//! Small graphs go through the dense tridiagonal solver. Larger ones use
//! Lanczos on the Laplacian pseudo-inverse: the largest eigenvalue of `L⁺`
//! restricted to the complement of the all-ones vector is `1 / λ2`. `L⁺` is
//! applied through an envelope Cholesky factor of the grounded Laplacian
//! under a reverse Cuthill-McKee ordering, which keeps the fill close to
//! the graph's bandwidth.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg;

/// Graphs up to this many nodes use the dense eigenvalue route.
pub const DENSE_LIMIT: usize = 160;

/// Relative Ritz residual at which Lanczos stops.
const LANCZOS_TOLERANCE: f64 = 1e-13;

/// Second-smallest Laplacian eigenvalue of a connected graph with at least
/// two nodes. Callers check connectivity.
pub(crate) fn connected_lambda2(g: &Graph) -> Result<f64> {
    if g.node_count() <= DENSE_LIMIT {
        dense_lambda2(g)
    } else {
        lanczos_lambda2(g)
    }
}

pub(crate) fn dense_lambda2(g: &Graph) -> Result<f64> {
    let spectrum = linalg::symmetric_eigenvalues(&g.laplacian())?;
    Ok(spectrum[1].max(0.0))
}

pub(crate) fn lanczos_lambda2(g: &Graph) -> Result<f64> {
    let n = g.node_count();
    let factor = GroundedCholesky::new(g)?;
    let dim = n - 1;

    let mut rng = ChaCha8Rng::seed_from_u64(0x1A2C_3E4F);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    center(&mut q);
    normalize(&mut q);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];

    loop {
        factor.apply_pseudo_inverse(&q, &mut w);
        let alpha = dot(&q, &w);
        axpy(-alpha, &q, &mut w);
        if let (Some(prev), Some(&beta)) = (basis.last(), betas.last()) {
            axpy(-beta, prev, &mut w);
        }
        // Full reorthogonalization, twice.
        for _ in 0..2 {
            for b in basis.iter().chain(std::iter::once(&q)) {
                let c = dot(b, &w);
                axpy(-c, b, &mut w);
            }
            center(&mut w);
        }
        alphas.push(alpha);
        let beta = norm(&w);
        basis.push(std::mem::take(&mut q));

        let (theta, last) = largest_ritz_pair(&alphas, &betas)?;
        if theta <= 0.0 {
            return Err(Error::Numeric("non-positive Ritz value for L⁺".into()));
        }
        let residual = (beta * last).abs();
        if residual <= LANCZOS_TOLERANCE * theta
            || beta <= f64::EPSILON * theta
            || basis.len() == dim
        {
            return Ok(1.0 / theta);
        }
        betas.push(beta);
        q = w.iter().map(|x| x / beta).collect();
    }
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alphas` and off-diagonal `betas`, and the last component of its unit
/// eigenvector.
fn largest_ritz_pair(alphas: &[f64], betas: &[f64]) -> Result<(f64, f64)> {
    let k = alphas.len();
    let mut d = alphas.to_vec();
    let mut e = vec![0.0; k];
    e[..k - 1].copy_from_slice(betas);
    let mut z = vec![0.0; k];
    z[k - 1] = 1.0;
    ql_tracking_last_row(&mut d, &mut e, &mut z)?;
    let (best, theta) = d
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty tridiagonal");
    Ok((theta, z[best]))
}

/// Implicit QL on a tridiagonal matrix (`e[i]` couples `i` and `i + 1`),
/// applying every rotation to the single eigenvector row `z`. On return `z[j]`
/// is the component of eigenvector `j` in the row `z` started as.
fn ql_tracking_last_row(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
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
            if iterations > 64 {
                return Err(Error::Numeric(
                    "Lanczos tridiagonal QL did not converge".into(),
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
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
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

/// Envelope Cholesky factor of the Laplacian with one node removed.
struct GroundedCholesky {
    /// `order[k]` is the graph node placed at position `k`.
    order: Vec<usize>,
    /// Position of each graph node; the grounded node maps to `dim`.
    position: Vec<usize>,
    /// First stored column of each factor row.
    first: Vec<usize>,
    /// Offset of each row's segment in `values`.
    offset: Vec<usize>,
    values: Vec<f64>,
}

impl GroundedCholesky {
    fn new(g: &Graph) -> Result<Self> {
        let n = g.node_count();
        let order = reverse_cuthill_mckee(g);
        let mut position = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            position[v] = k;
        }
        let dim = n - 1;
        let mut first: Vec<usize> = (0..dim).collect();
        for (k, f) in first.iter_mut().enumerate() {
            for &w in g.neighbors(order[k]) {
                let pw = position[w];
                if pw < dim {
                    *f = (*f).min(pw);
                }
            }
        }
        let mut offset = Vec::with_capacity(dim + 1);
        let mut total = 0;
        for (k, &f) in first.iter().enumerate() {
            offset.push(total);
            total += k - f + 1;
        }
        offset.push(total);
        let mut values = vec![0.0; total];
        for k in 0..dim {
            let v = order[k];
            values[offset[k] + k - first[k]] = g.degree(v) as f64;
            for &w in g.neighbors(v) {
                let pw = position[w];
                if pw < k {
                    values[offset[k] + pw - first[k]] = -1.0;
                }
            }
        }

        for i in 0..dim {
            let fi = first[i];
            let (done, rest) = values.split_at_mut(offset[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let start = fi.max(fj);
                let row_j = &done[offset[j]..offset[j] + j - fj + 1];
                let s: f64 = row_i[start - fi..j - fi]
                    .iter()
                    .zip(&row_j[start - fj..j - fj])
                    .map(|(a, b)| a * b)
                    .sum();
                row_i[j - fi] = (row_i[j - fi] - s) / row_j[j - fj];
            }
            let s: f64 = row_i[..i - fi].iter().map(|x| x * x).sum();
            let pivot = row_i[i - fi] - s;
            if pivot <= 0.0 || !pivot.is_finite() {
                return Err(Error::Numeric(
                    "grounded Laplacian is not positive definite (graph disconnected?)".into(),
                ));
            }
            row_i[i - fi] = pivot.sqrt();
        }
        Ok(GroundedCholesky {
            order,
            position,
            first,
            offset,
            values,
        })
    }

    fn dim(&self) -> usize {
        self.order.len() - 1
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.values[self.offset[i]..self.offset[i + 1]]
    }

    /// `out = P L⁺ P b` where P projects out the all-ones vector.
    fn apply_pseudo_inverse(&self, b: &[f64], out: &mut [f64]) {
        let dim = self.dim();
        let mut y: Vec<f64> = self.order[..dim].iter().map(|&v| b[v]).collect();
        // The right-hand side is centred, so grounding one node is exact.
        for i in 0..dim {
            let fi = self.first[i];
            let row = self.row(i);
            let s: f64 = row[..i - fi]
                .iter()
                .zip(&y[fi..i])
                .map(|(a, b)| a * b)
                .sum();
            y[i] = (y[i] - s) / row[i - fi];
        }
        for i in (0..dim).rev() {
            let fi = self.first[i];
            let row = self.row(i);
            let xi = y[i] / row[i - fi];
            y[i] = xi;
            for (yk, l) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *yk -= l * xi;
            }
        }
        for (v, o) in out.iter_mut().enumerate() {
            let p = self.position[v];
            *o = if p < dim { y[p] } else { 0.0 };
        }
        center(out);
    }
}

/// Reverse Cuthill-McKee ordering of a connected graph, started from a
/// pseudo-peripheral node.
fn reverse_cuthill_mckee(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let start = pseudo_peripheral_node(g);
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    let mut scratch = Vec::new();
    while let Some(v) = queue.pop_front() {
        order.push(v);
        scratch.clear();
        scratch.extend(g.neighbors(v).iter().copied().filter(|&w| !seen[w]));
        scratch.sort_by_key(|&w| (g.degree(w), w));
        for &w in &scratch {
            seen[w] = true;
            queue.push_back(w);
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral_node(g: &Graph) -> usize {
    let mut node = (0..g.node_count())
        .min_by_key(|&v| (g.degree(v), v))
        .unwrap_or(0);
    let mut eccentricity = 0;
    for _ in 0..8 {
        let dist = g.bfs_distances(node).expect("node in range");
        let ecc = dist.iter().copied().max().unwrap_or(0);
        if ecc <= eccentricity {
            break;
        }
        eccentricity = ecc;
        node = (0..dist.len())
            .filter(|&v| dist[v] == ecc)
            .min_by_key(|&v| (g.degree(v), v))
            .unwrap_or(node);
    }
    node
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let s = norm(a);
    a.iter_mut().for_each(|x| *x /= s);
}

fn center(a: &mut [f64]) {
    let mean = a.iter().sum::<f64>() / a.len() as f64;
    a.iter_mut().for_each(|x| *x -= mean);
}
