//! R* values and the robustness surface Ω.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::failure::{FailureScenario, ScenarioRun};
use crate::linalg::Matrix;
use crate::metrics::MetricVector;
use crate::pca::{self, PcaModel};

/// Weighted metric sum `Σ s_k t_k` with caller-chosen weights (the classic
/// R-value), kept for comparison with R*.
pub fn r_value(weights: &[f64], t: &[f64]) -> Result<f64> {
    dot_checked(weights, t)
}

/// `R* = Σ v̂_k t_k` for a metric vector `t`.
pub fn r_star(normalized: &[f64], t: &MetricVector) -> Result<f64> {
    dot_checked(normalized, &t.values)
}

fn dot_checked(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "dimension mismatch: {} weights for {} metrics",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
}

/// The |P| × m surface of R* values. Row `i` belongs to `percentages[i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessSurface {
    pub scenario: FailureScenario,
    pub percentages: Vec<u32>,
    /// Rows sorted in decreasing order.
    pub omega: Vec<Vec<f64>>,
    /// The same values in configuration order.
    pub unsorted: Vec<Vec<f64>>,
    pub normalized: Vec<f64>,
    pub t0: Vec<f64>,
    pub r_star_init: f64,
}

impl RobustnessSurface {
    pub fn config_count(&self) -> usize {
        self.omega.first().map_or(0, Vec::len)
    }

    pub fn max_value(&self) -> f64 {
        self.omega
            .iter()
            .flatten()
            .copied()
            .filter(|x| x.is_finite())
            .fold(0.0, f64::max)
    }

    pub fn negative_count(&self) -> usize {
        self.omega.iter().flatten().filter(|&&x| x < 0.0).count()
    }

    pub fn min_value(&self) -> f64 {
        self.omega
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Fits the PCA model of a scenario run and projects every metric matrix
/// onto the normalized principal component.
pub fn build_surface(run: &ScenarioRun, alpha: f64) -> Result<(PcaModel, RobustnessSurface)> {
    if run.matrices.len() != run.plan.percentages().len() {
        return Err(Error::Input(format!(
            "{} metric matrices for {} percentages",
            run.matrices.len(),
            run.plan.percentages().len()
        )));
    }
    surface_from_matrices(
        run.scenario,
        run.plan.percentages(),
        &run.matrices,
        &run.t0.values,
        &run.t0.names(),
        alpha,
    )
    .map_err(|e| match e {
        Error::DegenerateData(msg) if run.scenario.strategy().is_targeted() => {
            Error::DegenerateData(format!(
            "{msg}; {} ranks elements without ties on this graph, so every configuration removes \
             the same elements",
            run.scenario
        ))
        }
        other => other,
    })
}

/// [`build_surface`] on explicit `A_p` matrices, one per percentage, each
/// configurations × metrics.
pub fn surface_from_matrices(
    scenario: FailureScenario,
    percentages: &[u32],
    matrices: &[Matrix],
    t0: &[f64],
    metric_names: &[&str],
    alpha: f64,
) -> Result<(PcaModel, RobustnessSurface)> {
    let m = matrices.first().map_or(0, Matrix::rows);
    if m < 2 {
        return Err(Error::Config(format!(
            "a surface needs at least 2 configurations, got {m}"
        )));
    }
    let n = t0.len();
    if matrices.len() != percentages.len() || metric_names.len() != n {
        return Err(Error::Input(format!(
            "{} matrices for {} percentages, {} metric names for {n} metrics",
            matrices.len(),
            percentages.len(),
            metric_names.len()
        )));
    }
    if let Some(a) = matrices.iter().find(|a| a.rows() != m || a.cols() != n) {
        return Err(Error::Input(format!(
            "metric matrix is {}x{}, expected {m}x{n}",
            a.rows(),
            a.cols()
        )));
    }
    let covariances = matrices
        .iter()
        .map(pca::covariance)
        .collect::<Result<Vec<_>>>()?;
    let model = PcaModel::fit(&covariances, t0, metric_names, alpha)?;

    let unsorted: Vec<Vec<f64>> = matrices
        .iter()
        .map(|a| {
            (0..m)
                .map(|r| {
                    a.row(r)
                        .iter()
                        .zip(&model.normalized)
                        .map(|(x, v)| x * v)
                        .sum()
                })
                .collect()
        })
        .collect();
    let omega = unsorted
        .iter()
        .map(|row| {
            let mut sorted = row.clone();
            sorted.sort_by(|a: &f64, b| b.total_cmp(a));
            sorted
        })
        .collect();
    let surface = RobustnessSurface {
        scenario,
        percentages: percentages.to_vec(),
        omega,
        unsorted,
        normalized: model.normalized.clone(),
        t0: t0.to_vec(),
        r_star_init: model.initial_robustness(),
    };
    Ok((model, surface))
}

/// Per-percentage mean and spread of a surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub mean_per_p: Vec<f64>,
    /// Population variance (divides by m).
    pub variance_per_p: Vec<f64>,
    /// Trapezoidal integral of the mean curve over the percentages.
    pub area_under_mean: f64,
}

pub fn summarize(surface: &RobustnessSurface) -> SurfaceSummary {
    let (mean_per_p, variance_per_p): (Vec<f64>, Vec<f64>) = surface
        .omega
        .iter()
        .map(|row| {
            let m = row.len() as f64;
            let mean = row.iter().sum::<f64>() / m;
            let variance = row.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / m;
            (mean, variance)
        })
        .unzip();
    let area_under_mean = trapezoid(&surface.percentages, &mean_per_p);
    SurfaceSummary {
        mean_per_p,
        variance_per_p,
        area_under_mean,
    }
}

/// Cumulative trapezoidal areas; entry `i` integrates up to `xs[i]`.
pub fn cumulative_area(xs: &[u32], ys: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        if i > 0 {
            acc += 0.5 * (ys[i] + ys[i - 1]) * f64::from(xs[i] - xs[i - 1]);
        }
        out.push(acc);
    }
    out
}

fn trapezoid(xs: &[u32], ys: &[f64]) -> f64 {
    cumulative_area(xs, ys).last().copied().unwrap_or(0.0)
}
