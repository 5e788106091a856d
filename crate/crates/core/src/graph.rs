//! Undirected simple graphs and the traversal and spectral primitives the
//! robustness metrics are built from.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::spectral;

/// Hop distance reported for nodes that cannot be reached from the source.
pub const UNREACHABLE: usize = usize::MAX;

/// Unordered node pair, stored with the smaller index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link(usize, usize);

impl Link {
    pub fn new(a: usize, b: usize) -> Self {
        if a <= b {
            Link(a, b)
        } else {
            Link(b, a)
        }
    }

    pub fn endpoints(self) -> (usize, usize) {
        (self.0, self.1)
    }
}

/// Undirected simple graph over dense node indices `0..node_count`.
///
/// Links are kept sorted; each adjacency list is sorted and paired with the
/// index of the link it uses, so `incident(i)[k]` is the link joining `i` and
/// `neighbors(i)[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    links: Vec<Link>,
    adjacency: Vec<Vec<usize>>,
    incident: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Graph with `node_count` isolated nodes.
    pub fn empty(node_count: usize) -> Self {
        Graph {
            links: Vec::new(),
            adjacency: vec![Vec::new(); node_count],
            incident: vec![Vec::new(); node_count],
            labels: None,
        }
    }

    /// Builds a graph, rejecting self-loops, duplicate links and indices out of range.
    pub fn from_links<I>(node_count: usize, links: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        for (a, b) in links {
            if a >= node_count || b >= node_count {
                return Err(Error::Input(format!(
                    "link {a}-{b} references a node outside 0..{node_count}"
                )));
            }
            if a == b {
                return Err(Error::Input(format!("self-loop on node {a}")));
            }
            list.push(Link::new(a, b));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            let (a, b) = w[0].endpoints();
            return Err(Error::Input(format!("duplicate link {a}-{b}")));
        }
        Ok(Self::from_sorted_links(node_count, list))
    }

    fn from_sorted_links(node_count: usize, links: Vec<Link>) -> Self {
        let mut adjacency = vec![Vec::new(); node_count];
        let mut incident = vec![Vec::new(); node_count];
        // Sorted links fill every adjacency list in ascending neighbor order.
        for (id, link) in links.iter().enumerate() {
            let (a, b) = link.endpoints();
            adjacency[a].push(b);
            incident[a].push(id);
            adjacency[b].push(a);
            incident[b].push(id);
        }
        Graph {
            links,
            adjacency,
            incident,
            labels: None,
        }
    }

    /// Attaches external node identifiers, one per node.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::Input(format!(
                "{} labels supplied for {} nodes",
                labels.len(),
                self.node_count()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn incident(&self, node: usize) -> &[usize] {
        &self.incident[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External identifier of `node`, or its index when the graph is unlabelled.
    pub fn label(&self, node: usize) -> String {
        match &self.labels {
            Some(labels) => labels[node].clone(),
            None => node.to_string(),
        }
    }

    /// Index of `link` in [`Graph::links`], if present.
    pub fn link_index(&self, link: Link) -> Option<usize> {
        self.links.binary_search(&link).ok()
    }

    pub fn has_link(&self, a: usize, b: usize) -> bool {
        self.link_index(Link::new(a, b)).is_some()
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node >= self.node_count() {
            return Err(Error::Input(format!(
                "node {node} out of range for a graph with {} nodes",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Graph on `nodes` (in the given order) with every link of `self` whose
    /// endpoints are both kept. Labels follow their nodes.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Graph> {
        let mut new_index = vec![UNREACHABLE; self.node_count()];
        for (i, &node) in nodes.iter().enumerate() {
            self.check_node(node)?;
            if new_index[node] != UNREACHABLE {
                return Err(Error::Input(format!("node {node} listed twice")));
            }
            new_index[node] = i;
        }
        let mut kept: Vec<Link> = self
            .links
            .iter()
            .filter_map(|l| {
                let (a, b) = l.endpoints();
                let (na, nb) = (new_index[a], new_index[b]);
                (na != UNREACHABLE && nb != UNREACHABLE).then(|| Link::new(na, nb))
            })
            .collect();
        kept.sort_unstable();
        let mut sub = Self::from_sorted_links(nodes.len(), kept);
        sub.labels = self
            .labels
            .as_ref()
            .map(|labels| nodes.iter().map(|&n| labels[n].clone()).collect());
        Ok(sub)
    }

    /// Deletes `victims` and their incident links; survivors keep their
    /// relative order and are re-indexed densely.
    pub fn remove_nodes(&self, victims: &[usize]) -> Result<Graph> {
        let mut removed = vec![false; self.node_count()];
        for &v in victims {
            self.check_node(v)?;
            removed[v] = true;
        }
        let survivors: Vec<usize> = (0..self.node_count()).filter(|&i| !removed[i]).collect();
        self.induced_subgraph(&survivors)
    }

    /// Deletes `victims` from the link set; the node set is unchanged.
    pub fn remove_links(&self, victims: &[Link]) -> Result<Graph> {
        let mut removed = vec![false; self.link_count()];
        for &link in victims {
            let id = self.link_index(link).ok_or_else(|| {
                let (a, b) = link.endpoints();
                Error::Input(format!("link {a}-{b} is not in the graph"))
            })?;
            removed[id] = true;
        }
        self.without_link_ids(&removed)
    }

    /// Drops the links whose index is flagged in `removed`.
    pub(crate) fn without_link_ids(&self, removed: &[bool]) -> Result<Graph> {
        let kept = self
            .links
            .iter()
            .zip(removed)
            .filter(|(_, &gone)| !gone)
            .map(|(l, _)| *l)
            .collect();
        let mut g = Self::from_sorted_links(self.node_count(), kept);
        g.labels = self.labels.clone();
        Ok(g)
    }

    /// Minimal hop counts from `source`; unreachable nodes carry [`UNREACHABLE`].
    pub fn bfs_distances(&self, source: usize) -> Result<Vec<usize>> {
        self.check_node(source)?;
        let mut dist = vec![UNREACHABLE; self.node_count()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if dist[w] == UNREACHABLE {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    pub fn connected_components(&self) -> ComponentPartition {
        let n = self.node_count();
        let mut raw = vec![UNREACHABLE; n];
        let mut raw_sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if raw[start] != UNREACHABLE {
                continue;
            }
            let id = raw_sizes.len();
            raw[start] = id;
            queue.push_back(start);
            let mut size = 0;
            while let Some(v) = queue.pop_front() {
                size += 1;
                for &w in &self.adjacency[v] {
                    if raw[w] == UNREACHABLE {
                        raw[w] = id;
                        queue.push_back(w);
                    }
                }
            }
            raw_sizes.push(size);
        }
        // Largest first; equal sizes keep discovery order.
        let mut order: Vec<usize> = (0..raw_sizes.len()).collect();
        order.sort_by(|&a, &b| raw_sizes[b].cmp(&raw_sizes[a]));
        let mut rank = vec![0; order.len()];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        ComponentPartition {
            component_of: raw.into_iter().map(|c| rank[c]).collect(),
            sizes: order.iter().map(|&c| raw_sizes[c]).collect(),
        }
    }

    /// Nodes of the largest connected component, ascending.
    pub fn largest_component_nodes(&self) -> Vec<usize> {
        self.connected_components().members(0)
    }

    /// Dense combinatorial Laplacian `Deg - Adjacency`.
    pub fn laplacian(&self) -> Matrix {
        let n = self.node_count();
        let mut l = Matrix::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = self.degree(i) as f64;
        }
        for link in &self.links {
            let (a, b) = link.endpoints();
            l[(a, b)] = -1.0;
            l[(b, a)] = -1.0;
        }
        l
    }

    /// Algebraic connectivity: the second-smallest Laplacian eigenvalue.
    /// Exactly 0 for disconnected graphs.
    pub fn laplacian_second_eigenvalue(&self) -> Result<f64> {
        if self.node_count() < 2 {
            return Err(Error::Domain(format!(
                "algebraic connectivity needs at least 2 nodes, got {}",
                self.node_count()
            )));
        }
        if self.connected_components().count() > 1 {
            return Ok(0.0);
        }
        spectral::connected_lambda2(self)
    }
}

/// Assignment of every node to a connected component. Component 0 is the
/// largest; sizes are non-increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPartition {
    pub component_of: Vec<usize>,
    pub sizes: Vec<usize>,
}

impl ComponentPartition {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn largest(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    /// Nodes in component `c`, ascending.
    pub fn members(&self, c: usize) -> Vec<usize> {
        self.component_of
            .iter()
            .enumerate()
            .filter(|(_, &k)| k == c)
            .map(|(i, _)| i)
            .collect()
    }
}
