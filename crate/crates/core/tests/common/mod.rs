//! Graph generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use netsurface::{Graph, Link};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdős–Rényi G(n, p).
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut links = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if r.gen::<f64>() < p {
                links.push((a, b));
            }
        }
    }
    Graph::from_links(n, links).unwrap()
}

/// A uniformly random labelled tree plus `links - (n - 1)` extra random links:
/// connected, sparse, no particular degree structure.
pub fn connected_random(n: usize, links: usize, seed: u64) -> Graph {
    assert!(links + 1 >= n && links <= n * (n - 1) / 2);
    let mut r = rng(seed);
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(&mut r);
    let mut set = BTreeSet::new();
    for i in 1..n {
        let parent = nodes[r.gen_range(0..i)];
        let (a, b) = (nodes[i], parent);
        set.insert((a.min(b), a.max(b)));
    }
    while set.len() < links {
        let a = r.gen_range(0..n);
        let b = r.gen_range(0..n);
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    Graph::from_links(n, set).unwrap()
}

/// Preferential attachment: start from a clique on `m + 1` nodes, then each
/// new node attaches to `m` distinct existing nodes chosen with probability
/// proportional to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut links = Vec::new();
    // Each node appears once per incident link end.
    let mut ends = Vec::new();
    for a in 0..=m {
        for b in a + 1..=m {
            links.push((a, b));
            ends.extend([a, b]);
        }
    }
    for v in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(ends[r.gen_range(0..ends.len())]);
        }
        for t in targets {
            links.push((t, v));
            ends.extend([t, v]);
        }
    }
    Graph::from_links(n, links).unwrap()
}

/// Hop distances by Floyd–Warshall; `None` when unreachable.
pub fn all_pairs_distances(g: &Graph) -> Vec<Vec<Option<usize>>> {
    let n = g.node_count();
    let mut d = vec![vec![None; n]; n];
    for v in 0..n {
        d[v][v] = Some(0);
        for &u in g.neighbors(v) {
            d[v][u] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Every shortest path from `s` to `t`, listed node by node, found by
/// depth-first enumeration of walks that get one hop closer each step.
pub fn shortest_paths(
    g: &Graph,
    dist: &[Vec<Option<usize>>],
    s: usize,
    t: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if dist[s][t].is_none() {
        return out;
    }
    let mut stack = vec![s];
    extend_paths(g, dist, t, &mut stack, &mut out);
    out
}

fn extend_paths(
    g: &Graph,
    dist: &[Vec<Option<usize>>],
    t: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let v = *stack.last().unwrap();
    if v == t {
        out.push(stack.clone());
        return;
    }
    let remaining = dist[v][t].unwrap();
    for &u in g.neighbors(v) {
        if dist[u][t] == Some(remaining - 1) {
            stack.push(u);
            extend_paths(g, dist, t, stack, out);
            stack.pop();
        }
    }
}

/// Node and link betweenness by explicit enumeration: each unordered pair
/// spreads one unit over its shortest paths.
pub fn brute_force_betweenness(g: &Graph) -> (Vec<f64>, Vec<f64>) {
    let n = g.node_count();
    let dist = all_pairs_distances(g);
    let mut node = vec![0.0; n];
    let mut link = vec![0.0; g.link_count()];
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(g, &dist, s, t);
            let share = 1.0 / paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    node[v] += share;
                }
                for w in path.windows(2) {
                    link[g.link_index(Link::new(w[0], w[1])).unwrap()] += share;
                }
            }
        }
    }
    (node, link)
}

/// Fraction of unordered pairs with a path, counted pair by pair.
pub fn brute_force_reliability(g: &Graph) -> f64 {
    let n = g.node_count();
    let dist = all_pairs_distances(g);
    let mut connected = 0usize;
    for s in 0..n {
        for t in s + 1..n {
            if dist[s][t].is_some() {
                connected += 1;
            }
        }
    }
    connected as f64 / (n * (n - 1) / 2) as f64
}

pub fn is_connected(g: &Graph) -> bool {
    g.connected_components().count() <= 1
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
