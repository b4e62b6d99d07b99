use serde::{Deserialize, Serialize};

use crate::graph::{Graph, NodeId};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub avg_clustering_coefficient: f64,
    pub closed_triads: u64,
    pub num_nodes: usize,
    pub num_edges: usize,
}

fn count_common(a: &[NodeId], b: &[NodeId]) -> u64 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Number of edges among each node's neighbors (triangles through it).
/// Assumes symmetric storage.
pub fn local_triangles(g: &Graph) -> Vec<u64> {
    let per_node = |v: NodeId| -> u64 {
        let row = g.neighbors(v);
        // each neighbor pair {u, w} is seen from u and from w
        row.iter().map(|&u| count_common(row, g.neighbors(u))).sum::<u64>() / 2
    };
    #[cfg(feature = "parallel")]
    {
        (0..g.num_nodes() as NodeId).into_par_iter().map(per_node).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..g.num_nodes() as NodeId).map(per_node).collect()
    }
}

fn average_cc(g: &Graph, tri: &[u64]) -> f64 {
    if g.num_nodes() == 0 {
        return 0.0;
    }
    let sum: f64 = tri
        .iter()
        .enumerate()
        .map(|(v, &t)| {
            let d = g.degree(v as NodeId) as f64;
            if d < 2.0 {
                0.0
            } else {
                2.0 * t as f64 / (d * (d - 1.0))
            }
        })
        .sum();
    sum / g.num_nodes() as f64
}

/// Mean local clustering coefficient; nodes of degree < 2 count as 0.
pub fn clustering_coefficient(g: &Graph) -> f64 {
    average_cc(g, &local_triangles(g))
}

/// Number of triangles (unordered triples of mutually adjacent nodes).
pub fn closed_triads(g: &Graph) -> u64 {
    local_triangles(g).iter().sum::<u64>() / 3
}

pub fn topology(g: &Graph) -> TopologyReport {
    let tri = local_triangles(g);
    TopologyReport {
        avg_clustering_coefficient: average_cc(g, &tri),
        closed_triads: tri.iter().sum::<u64>() / 3,
        num_nodes: g.num_nodes(),
        num_edges: g.num_edges(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)], false).unwrap();
        assert_eq!(clustering_coefficient(&g), 1.0);
        assert_eq!(closed_triads(&g), 1);
    }

    #[test]
    fn path() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], false).unwrap();
        assert_eq!(clustering_coefficient(&g), 0.0);
        assert_eq!(closed_triads(&g), 0);
    }

    #[test]
    fn chorded_cycle() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)], false).unwrap();
        assert!((clustering_coefficient(&g) - 5.0 / 6.0).abs() < 1e-12);
        assert_eq!(closed_triads(&g), 2);
        let t = topology(&g);
        assert_eq!((t.num_nodes, t.num_edges, t.closed_triads), (4, 5, 2));
    }

    #[test]
    fn trees_have_no_triads() {
        let g = Graph::from_edges(7, &[(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)], false).unwrap();
        assert_eq!(closed_triads(&g), 0);
        assert_eq!(clustering_coefficient(&g), 0.0);
        assert_eq!(clustering_coefficient(&Graph::empty(0)), 0.0);
    }
}
