//! Small named graphs shared by unit tests.

use crate::graph::Graph;

pub fn path(n: usize) -> Graph {
    Graph::from_links(n, (1..n).map(|i| (i - 1, i))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    Graph::from_links(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

pub fn complete(n: usize) -> Graph {
    Graph::from_links(n, (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))).unwrap()
}

/// Hub 0 joined to `n - 1` leaves.
pub fn star(n: usize) -> Graph {
    Graph::from_links(n, (1..n).map(|i| (0, i))).unwrap()
}
