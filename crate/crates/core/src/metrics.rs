//! Robustness metrics of a (possibly degraded) graph.
//!
//! Path metrics (average shortest path, diameter, algebraic connectivity) are
//! evaluated on the largest connected component. Betweenness values are raw
//! shortest-path counts with every unordered pair counted once.

use serde::{Deserialize, Serialize};

use crate::betweenness;
use crate::error::{Error, Result};
use crate::graph::{ComponentPartition, Graph};

/// Whether a failure scenario removes nodes or links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Node,
    Link,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    LargestComponent,
    Fragmentation,
    AverageDegree,
    TwoTerminalReliability,
    AverageClustering,
    AverageShortestPath,
    Diameter,
    AverageNodeBetweenness,
    AverageLinkBetweenness,
    AlgebraicConnectivity,
}

const LINK_METRICS: [Metric; 10] = [
    Metric::LargestComponent,
    Metric::Fragmentation,
    Metric::AverageDegree,
    Metric::TwoTerminalReliability,
    Metric::AverageClustering,
    Metric::AverageShortestPath,
    Metric::Diameter,
    Metric::AverageNodeBetweenness,
    Metric::AverageLinkBetweenness,
    Metric::AlgebraicConnectivity,
];

const NODE_METRICS: [Metric; 9] = [
    Metric::LargestComponent,
    Metric::AverageDegree,
    Metric::TwoTerminalReliability,
    Metric::AverageClustering,
    Metric::AverageShortestPath,
    Metric::Diameter,
    Metric::AverageNodeBetweenness,
    Metric::AverageLinkBetweenness,
    Metric::AlgebraicConnectivity,
];

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::LargestComponent => "lcc",
            Metric::Fragmentation => "fragmentation",
            Metric::AverageDegree => "avg_degree",
            Metric::TwoTerminalReliability => "two_terminal_reliability",
            Metric::AverageClustering => "avg_clustering",
            Metric::AverageShortestPath => "avg_shortest_path",
            Metric::Diameter => "diameter",
            Metric::AverageNodeBetweenness => "avg_node_betweenness",
            Metric::AverageLinkBetweenness => "avg_link_betweenness",
            Metric::AlgebraicConnectivity => "algebraic_connectivity",
        }
    }

    /// Fixed metric order for a scenario's element kind. Fragmentation only
    /// applies to link failures.
    pub fn set_for(kind: ElementKind) -> &'static [Metric] {
        match kind {
            ElementKind::Link => &LINK_METRICS,
            ElementKind::Node => &NODE_METRICS,
        }
    }
}

/// The metric vector `t` of one graph, in [`Metric::set_for`] order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricVector {
    pub kind: ElementKind,
    pub values: Vec<f64>,
}

impl MetricVector {
    pub fn metrics(&self) -> &'static [Metric] {
        Metric::set_for(self.kind)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.metrics().iter().map(|m| m.name()).collect()
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        self.metrics()
            .iter()
            .position(|&m| m == metric)
            .map(|i| self.values[i])
    }
}

/// A mean with its population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std_dev: f64,
}

/// Descriptive statistics of a topology.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationStats {
    pub node_count: usize,
    pub link_count: usize,
    pub degree: MeanStd,
    pub max_degree: usize,
    /// Over node pairs of the largest connected component.
    pub shortest_path: MeanStd,
    /// `None` when the endpoint degree variance is zero.
    pub assortativity: Option<f64>,
}

/// Size of the largest component relative to the pre-failure node count.
pub fn lcc_size(g: &Graph, initial_nodes: usize) -> Result<f64> {
    if initial_nodes == 0 {
        return Err(Error::Domain("initial node count must be positive".into()));
    }
    Ok(g.connected_components().largest() as f64 / initial_nodes as f64)
}

/// `(C - 1) / (N - 1)` for `C` components over `N` nodes.
pub fn fragmentation(g: &Graph) -> Result<f64> {
    let n = require_nodes(g, 2, "fragmentation")?;
    Ok(fragmentation_of(&g.connected_components(), n))
}

fn fragmentation_of(parts: &ComponentPartition, n: usize) -> f64 {
    (parts.count() - 1) as f64 / (n - 1) as f64
}

pub fn avg_degree(g: &Graph) -> Result<MeanStd> {
    require_nodes(g, 1, "average degree")?;
    Ok(mean_std(g.degrees().into_iter().map(|d| d as f64)))
}

/// Fraction of unordered node pairs joined by some path.
pub fn two_terminal_reliability(g: &Graph) -> Result<f64> {
    let n = require_nodes(g, 2, "two-terminal reliability")?;
    Ok(reliability_of(&g.connected_components(), n))
}

fn reliability_of(parts: &ComponentPartition, n: usize) -> f64 {
    let connected: usize = parts.sizes.iter().map(|&s| s * (s - 1)).sum();
    connected as f64 / (n * (n - 1)) as f64
}

/// Local clustering coefficient of every node; degree < 2 gives 0.
pub fn local_clustering(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut marked = vec![false; n];
    (0..n)
        .map(|v| {
            let k = g.degree(v);
            if k < 2 {
                return 0.0;
            }
            for &u in g.neighbors(v) {
                marked[u] = true;
            }
            let mut twice_links = 0usize;
            for &u in g.neighbors(v) {
                twice_links += g.neighbors(u).iter().filter(|&&w| marked[w]).count();
            }
            for &u in g.neighbors(v) {
                marked[u] = false;
            }
            twice_links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

pub fn avg_clustering(g: &Graph) -> Result<f64> {
    let n = require_nodes(g, 1, "average clustering")?;
    Ok(local_clustering(g).iter().sum::<f64>() / n as f64)
}

/// Hop-distance statistics over the unordered node pairs of the largest
/// component.
pub fn avg_shortest_path(g: &Graph) -> Result<MeanStd> {
    let parts = g.connected_components();
    require_lcc(&parts, "average shortest path")?;
    let sweep = betweenness::sweep(g);
    Ok(lcc_path_stats(&parts, &sweep).0)
}

pub fn diameter(g: &Graph) -> Result<usize> {
    let parts = g.connected_components();
    require_lcc(&parts, "diameter")?;
    let sweep = betweenness::sweep(g);
    Ok(lcc_path_stats(&parts, &sweep).1)
}

fn lcc_path_stats(parts: &ComponentPartition, sweep: &betweenness::Sweep) -> (MeanStd, usize) {
    let (mut sum, mut sq, mut diameter) = (0u64, 0u64, 0usize);
    for (v, &c) in parts.component_of.iter().enumerate() {
        if c == 0 {
            sum += sweep.distance_sum[v];
            sq += sweep.distance_sq_sum[v];
            diameter = diameter.max(sweep.eccentricity[v]);
        }
    }
    let s = parts.largest() as f64;
    let ordered_pairs = s * (s - 1.0);
    let mean = sum as f64 / ordered_pairs;
    let variance = (sq as f64 / ordered_pairs - mean * mean).max(0.0);
    (
        MeanStd {
            mean,
            std_dev: variance.sqrt(),
        },
        diameter,
    )
}

pub fn node_betweenness(g: &Graph) -> Vec<f64> {
    betweenness::sweep(g).node
}

pub fn avg_node_betweenness(g: &Graph) -> Result<f64> {
    let n = require_nodes(g, 1, "average node betweenness")?;
    Ok(node_betweenness(g).iter().sum::<f64>() / n as f64)
}

/// Per-link betweenness aligned with [`Graph::links`].
pub fn link_betweenness(g: &Graph) -> Vec<f64> {
    betweenness::sweep(g).link
}

pub fn avg_link_betweenness(g: &Graph) -> Result<f64> {
    if g.link_count() == 0 {
        return Err(Error::Domain(
            "average link betweenness needs at least one link".into(),
        ));
    }
    Ok(link_betweenness(g).iter().sum::<f64>() / g.link_count() as f64)
}

/// Second-smallest Laplacian eigenvalue of the largest component.
pub fn algebraic_connectivity(g: &Graph) -> Result<f64> {
    let parts = g.connected_components();
    require_lcc(&parts, "algebraic connectivity")?;
    lcc_algebraic_connectivity(g, &parts)
}

fn lcc_algebraic_connectivity(g: &Graph, parts: &ComponentPartition) -> Result<f64> {
    if parts.count() == 1 {
        return g.laplacian_second_eigenvalue();
    }
    g.induced_subgraph(&parts.members(0))?
        .laplacian_second_eigenvalue()
}

/// Degree assortativity: Pearson correlation of endpoint degrees, each link
/// counted in both orientations.
pub fn assortativity(g: &Graph) -> Result<f64> {
    if g.link_count() < 2 {
        return Err(Error::Domain(
            "assortativity needs at least two links".into(),
        ));
    }
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut sum_prod = 0.0;
    for link in g.links() {
        let (a, b) = link.endpoints();
        let (x, y) = (g.degree(a) as f64, g.degree(b) as f64);
        sum += x + y;
        sum_sq += x * x + y * y;
        sum_prod += 2.0 * x * y;
    }
    let m = 2.0 * g.link_count() as f64;
    let mean = sum / m;
    let variance = sum_sq / m - mean * mean;
    if variance <= 1e-12 * (1.0 + mean * mean) {
        return Err(Error::Undefined(
            "assortativity is undefined: all link endpoints have the same degree".into(),
        ));
    }
    Ok(((sum_prod / m - mean * mean) / variance).clamp(-1.0, 1.0))
}

/// Assembles the metric vector of `g` for `kind`, normalising the largest
/// component by `initial_nodes`. Metrics whose preconditions fail on a
/// collapsed graph are recorded as 0.
pub fn metric_vector(g: &Graph, kind: ElementKind, initial_nodes: usize) -> Result<MetricVector> {
    if initial_nodes < g.node_count() {
        return Err(Error::Input(format!(
            "initial node count {initial_nodes} is below the current {}",
            g.node_count()
        )));
    }
    let n = g.node_count();
    let parts = g.connected_components();
    let sweep = betweenness::sweep(g);
    let lcc = parts.largest();
    let (paths, diameter) = if lcc >= 2 {
        let (p, d) = lcc_path_stats(&parts, &sweep);
        (p.mean, d as f64)
    } else {
        (0.0, 0.0)
    };
    let algebraic = if lcc >= 2 {
        lcc_algebraic_connectivity(g, &parts)?
    } else {
        0.0
    };
    let values = Metric::set_for(kind)
        .iter()
        .map(|metric| match metric {
            Metric::LargestComponent if initial_nodes > 0 => lcc as f64 / initial_nodes as f64,
            Metric::Fragmentation if n >= 2 => fragmentation_of(&parts, n),
            Metric::AverageDegree if n >= 1 => 2.0 * g.link_count() as f64 / n as f64,
            Metric::TwoTerminalReliability if n >= 2 => reliability_of(&parts, n),
            Metric::AverageClustering if n >= 1 => {
                local_clustering(g).iter().sum::<f64>() / n as f64
            }
            Metric::AverageShortestPath => paths,
            Metric::Diameter => diameter,
            Metric::AverageNodeBetweenness if n >= 1 => sweep.node.iter().sum::<f64>() / n as f64,
            Metric::AverageLinkBetweenness if g.link_count() >= 1 => {
                sweep.link.iter().sum::<f64>() / g.link_count() as f64
            }
            Metric::AlgebraicConnectivity => algebraic,
            _ => 0.0,
        })
        .collect();
    Ok(MetricVector { kind, values })
}

/// Summary statistics of a topology: size, degree distribution, path
/// lengths over the largest component and assortativity.
pub fn characterize(g: &Graph) -> Result<CharacterizationStats> {
    let degree = avg_degree(g)?;
    let shortest_path = avg_shortest_path(g)?;
    let assortativity = match assortativity(g) {
        Ok(r) => Some(r),
        Err(Error::Undefined(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(CharacterizationStats {
        node_count: g.node_count(),
        link_count: g.link_count(),
        degree,
        max_degree: g.degrees().into_iter().max().unwrap_or(0),
        shortest_path,
        assortativity,
    })
}

fn require_nodes(g: &Graph, min: usize, what: &str) -> Result<usize> {
    let n = g.node_count();
    if n < min {
        return Err(Error::Domain(format!(
            "{what} needs at least {min} node(s), got {n}"
        )));
    }
    Ok(n)
}

fn require_lcc(parts: &ComponentPartition, what: &str) -> Result<()> {
    if parts.largest() < 2 {
        return Err(Error::Domain(format!(
            "{what} needs a connected component with at least 2 nodes"
        )));
    }
    Ok(())
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> MeanStd {
    let (count, sum) = values
        .clone()
        .fold((0usize, 0.0), |(c, s), x| (c + 1, s + x));
    let mean = sum / count as f64;
    let variance = values.map(|x| (x - mean) * (x - mean)).sum::<f64>() / count as f64;
    MeanStd {
        mean,
        std_dev: variance.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgraphs::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    /// Brute-force triangle count over node triples.
    fn clustering_by_triples(g: &Graph) -> f64 {
        let n = g.node_count();
        let mut total = 0.0;
        for v in 0..n {
            let k = g.degree(v);
            if k < 2 {
                continue;
            }
            let mut triangles = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    if a != v && b != v && g.has_link(v, a) && g.has_link(v, b) && g.has_link(a, b)
                    {
                        triangles += 1;
                    }
                }
            }
            total += triangles as f64 / (k * (k - 1) / 2) as f64;
        }
        total / n as f64
    }

    #[test]
    fn largest_component_fraction() {
        assert_eq!(lcc_size(&complete(4), 4).unwrap(), 1.0);
        let split = Graph::from_links(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(lcc_size(&split, 4).unwrap(), 0.5);
        let three_one = Graph::from_links(4, [(0, 1), (1, 2)]).unwrap();
        assert!(close(lcc_size(&three_one, 5).unwrap(), 0.6));
        assert!(lcc_size(&three_one, 0).is_err());
    }

    #[test]
    fn fragmentation_values() {
        assert_eq!(fragmentation(&cycle(5)).unwrap(), 0.0);
        assert_eq!(fragmentation(&Graph::empty(5)).unwrap(), 1.0);
        let three = Graph::from_links(5, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(fragmentation(&three).unwrap(), 0.5);
        assert!(matches!(
            fragmentation(&Graph::empty(1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn degree_statistics() {
        assert_eq!(
            avg_degree(&cycle(4)).unwrap(),
            MeanStd {
                mean: 2.0,
                std_dev: 0.0
            }
        );
        assert_eq!(avg_degree(&star(4)).unwrap().mean, 1.5);
        assert_eq!(
            avg_degree(&complete(4)).unwrap(),
            MeanStd {
                mean: 3.0,
                std_dev: 0.0
            }
        );
        assert!(avg_degree(&Graph::empty(0)).is_err());
    }

    #[test]
    fn reliability_values() {
        assert_eq!(two_terminal_reliability(&path(4)).unwrap(), 1.0);
        let g = Graph::from_links(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        // Pairs {0,1},{0,2},{1,2},{3,4} of 10 are connected.
        assert!(close(two_terminal_reliability(&g).unwrap(), 0.4));
        assert_eq!(two_terminal_reliability(&Graph::empty(4)).unwrap(), 0.0);
    }

    #[test]
    fn clustering_values() {
        assert_eq!(avg_clustering(&complete(3)).unwrap(), 1.0);
        assert_eq!(avg_clustering(&star(4)).unwrap(), 0.0);
        let g = complete(4).remove_links(&[crate::Link::new(2, 3)]).unwrap();
        assert!(close(clustering_by_triples(&g), 5.0 / 6.0));
        assert!(close(avg_clustering(&g).unwrap(), 5.0 / 6.0));
    }

    #[test]
    fn shortest_path_values() {
        assert_eq!(avg_shortest_path(&complete(4)).unwrap().mean, 1.0);
        assert!(close(avg_shortest_path(&path(3)).unwrap().mean, 4.0 / 3.0));
        assert!(close(avg_shortest_path(&cycle(5)).unwrap().mean, 1.5));
        assert!(close(avg_shortest_path(&cycle(5)).unwrap().std_dev, 0.5));
        assert!(matches!(
            avg_shortest_path(&Graph::empty(3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn diameter_values() {
        assert_eq!(diameter(&complete(5)).unwrap(), 1);
        assert_eq!(diameter(&path(4)).unwrap(), 3);
        // P3 on 0..3 and P5 on 3..8: the larger component decides.
        let g = Graph::from_links(8, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 6), (6, 7)]).unwrap();
        assert_eq!(diameter(&g).unwrap(), 4);
        assert!(diameter(&Graph::empty(1)).is_err());
    }

    #[test]
    fn betweenness_values() {
        assert_eq!(node_betweenness(&path(3))[1], 1.0);
        assert_eq!(node_betweenness(&complete(4)), vec![0.0; 4]);
        assert_eq!(node_betweenness(&star(5))[0], 6.0);
        assert_eq!(link_betweenness(&path(2)), vec![1.0]);
        assert_eq!(link_betweenness(&path(3)), vec![2.0, 2.0]);
        assert_eq!(avg_link_betweenness(&cycle(4)).unwrap(), 2.0);
        assert!(avg_link_betweenness(&Graph::empty(3)).is_err());
        assert!(avg_node_betweenness(&Graph::empty(0)).is_err());
    }

    #[test]
    fn algebraic_connectivity_on_largest_component() {
        assert!((algebraic_connectivity(&complete(4)).unwrap() - 4.0).abs() < 1e-8);
        let g = Graph::from_links(5, [(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        assert!((algebraic_connectivity(&g).unwrap() - 3.0).abs() < 1e-8);
        assert!((algebraic_connectivity(&path(2)).unwrap() - 2.0).abs() < 1e-8);
        assert!(algebraic_connectivity(&Graph::empty(4)).is_err());
    }

    #[test]
    fn assortativity_values() {
        assert!(close(assortativity(&star(5)).unwrap(), -1.0));
        assert!(matches!(assortativity(&cycle(6)), Err(Error::Undefined(_))));
        assert!(assortativity(&path(2)).is_err());
    }

    #[test]
    fn assortativity_matches_direct_pearson() {
        // Two hubs (0 and 1) joined, each with leaves.
        let g = Graph::from_links(7, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (1, 6)]).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for l in g.links() {
            let (a, b) = l.endpoints();
            xs.extend([g.degree(a) as f64, g.degree(b) as f64]);
            ys.extend([g.degree(b) as f64, g.degree(a) as f64]);
        }
        let m = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
        let pearson = cov / (vx * vy).sqrt();
        assert!(close(assortativity(&g).unwrap(), pearson));
    }

    #[test]
    fn intact_complete_graph_vector() {
        let t = metric_vector(&complete(4), ElementKind::Node, 4).unwrap();
        assert_eq!(t.values.len(), 9);
        let expected = [1.0, 3.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 4.0];
        for (got, want) in t.values.iter().zip(expected) {
            assert!((got - want).abs() < 1e-8, "{:?}", t.values);
        }
        assert_eq!(t.names()[0], "lcc");
    }

    #[test]
    fn collapsed_graph_vector_uses_zeros() {
        let t = metric_vector(&Graph::empty(5), ElementKind::Link, 5).unwrap();
        assert_eq!(
            t.values,
            vec![0.2, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        let gone = metric_vector(&Graph::empty(0), ElementKind::Node, 5).unwrap();
        assert_eq!(gone.values, vec![0.0; 9]);
        assert!(metric_vector(&complete(4), ElementKind::Node, 3).is_err());
    }

    #[test]
    fn vector_agrees_with_single_metrics() {
        let g =
            Graph::from_links(9, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (5, 6), (6, 7)]).unwrap();
        let t = metric_vector(&g, ElementKind::Link, 10).unwrap();
        let get = |m| t.get(m).unwrap();
        assert!(close(
            get(Metric::LargestComponent),
            lcc_size(&g, 10).unwrap()
        ));
        assert!(close(
            get(Metric::Fragmentation),
            fragmentation(&g).unwrap()
        ));
        assert!(close(
            get(Metric::AverageDegree),
            avg_degree(&g).unwrap().mean
        ));
        assert!(close(
            get(Metric::TwoTerminalReliability),
            two_terminal_reliability(&g).unwrap()
        ));
        assert!(close(
            get(Metric::AverageClustering),
            avg_clustering(&g).unwrap()
        ));
        assert!(close(
            get(Metric::AverageShortestPath),
            avg_shortest_path(&g).unwrap().mean
        ));
        assert!(close(get(Metric::Diameter), diameter(&g).unwrap() as f64));
        assert!(close(
            get(Metric::AverageNodeBetweenness),
            avg_node_betweenness(&g).unwrap()
        ));
        assert!(close(
            get(Metric::AverageLinkBetweenness),
            avg_link_betweenness(&g).unwrap()
        ));
        assert!(close(
            get(Metric::AlgebraicConnectivity),
            algebraic_connectivity(&g).unwrap()
        ));
    }

    #[test]
    fn characterize_complete_graph() {
        let stats = characterize(&complete(4)).unwrap();
        assert_eq!(
            (stats.node_count, stats.link_count, stats.max_degree),
            (4, 6, 3)
        );
        assert_eq!(
            stats.degree,
            MeanStd {
                mean: 3.0,
                std_dev: 0.0
            }
        );
        assert_eq!(
            stats.shortest_path,
            MeanStd {
                mean: 1.0,
                std_dev: 0.0
            }
        );
        assert_eq!(stats.assortativity, None);
    }
}
