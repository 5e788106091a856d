//! Network robustness under multiple failure scenarios: degradation
//! simulation, a ten-metric characterization, PCA-derived metric weights and
//! the R* robustness surface.

mod betweenness;
pub mod error;
pub mod failure;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod pca;
pub mod run;
mod spectral;
pub mod surface;
#[cfg(test)]
mod testgraphs;

pub use error::{Error, Result};
pub use failure::{FailureScenario, Ranking, RunPlan, ScenarioRun, Strategy};
pub use graph::{ComponentPartition, Graph, Link};
pub use metrics::{ElementKind, Metric, MetricVector};
pub use pca::PcaModel;
pub use surface::{RobustnessSurface, SurfaceSummary};
