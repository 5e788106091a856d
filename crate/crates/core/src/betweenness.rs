//! Brandes betweenness for nodes and links, sharing one all-sources BFS
//! sweep with the hop-distance statistics the path metrics need.

use std::collections::VecDeque;

use crate::graph::{Graph, UNREACHABLE};

/// Everything collected by one BFS from every node.
pub(crate) struct Sweep {
    /// Node betweenness, each unordered pair counted once, endpoints excluded.
    pub node: Vec<f64>,
    /// Link betweenness, aligned with [`Graph::links`].
    pub link: Vec<f64>,
    /// Per source: sum of hop distances to every reachable node.
    pub distance_sum: Vec<u64>,
    /// Per source: sum of squared hop distances.
    pub distance_sq_sum: Vec<u64>,
    /// Per source: largest finite hop distance.
    pub eccentricity: Vec<usize>,
}

pub(crate) fn sweep(g: &Graph) -> Sweep {
    let n = g.node_count();
    let mut node = vec![0.0; n];
    let mut link = vec![0.0; g.link_count()];
    let mut distance_sum = vec![0; n];
    let mut distance_sq_sum = vec![0; n];
    let mut eccentricity = vec![0; n];

    let mut dist = vec![UNREACHABLE; n];
    let mut sigma = vec![0.0f64; n];
    let mut delta = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        for &v in &order {
            dist[v] = UNREACHABLE;
            sigma[v] = 0.0;
            delta[v] = 0.0;
        }
        order.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let dv = dist[v];
            for &w in g.neighbors(v) {
                if dist[w] == UNREACHABLE {
                    dist[w] = dv + 1;
                    queue.push_back(w);
                }
                if dist[w] == dv + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }

        let (mut sum, mut sq, mut ecc) = (0u64, 0u64, 0usize);
        for &v in &order {
            let d = dist[v];
            sum += d as u64;
            sq += (d * d) as u64;
            ecc = ecc.max(d);
        }
        distance_sum[s] = sum;
        distance_sq_sum[s] = sq;
        eccentricity[s] = ecc;

        for &w in order.iter().rev() {
            let dw = dist[w];
            let coefficient = (1.0 + delta[w]) / sigma[w];
            for (&v, &id) in g.neighbors(w).iter().zip(g.incident(w)) {
                if dist[v] != UNREACHABLE && dist[v] + 1 == dw {
                    let c = sigma[v] * coefficient;
                    link[id] += c;
                    delta[v] += c;
                }
            }
            if w != s {
                node[w] += delta[w];
            }
        }
    }

    // Every unordered pair was visited from both ends.
    node.iter_mut().for_each(|x| *x /= 2.0);
    link.iter_mut().for_each(|x| *x /= 2.0);
    Sweep {
        node,
        link,
        distance_sum,
        distance_sq_sum,
        eccentricity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgraphs::*;

    #[test]
    fn path_and_star_values() {
        let s = sweep(&path(3));
        assert_eq!(s.node, vec![0.0, 1.0, 0.0]);
        assert_eq!(s.link, vec![2.0, 2.0]);
        assert_eq!(s.distance_sum, vec![3, 2, 3]);
        assert_eq!(s.eccentricity, vec![2, 1, 2]);
        assert_eq!(sweep(&star(5)).node[0], 6.0);
    }

    #[test]
    fn cycle_links_share_the_pair_mass() {
        // 4 adjacent pairs on their own link, 2 antipodal pairs split over two
        // paths of two links each: 4 + 2 * 2 = 8 spread over 4 links.
        let s = sweep(&cycle(4));
        assert_eq!(s.link, vec![2.0; 4]);
        assert_eq!(s.node, vec![0.5; 4]);
    }
}
