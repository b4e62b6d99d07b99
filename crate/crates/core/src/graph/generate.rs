use rand::seq::SliceRandom;
use rand::Rng;

use super::{Graph, NodeId};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A planted-partition graph with its cluster labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusteredGraph {
    pub graph: Graph,
    pub labels: Vec<u32>,
    pub num_clusters: usize,
}

/// Planted-partition generator. Cluster `c` owns ids `[c*k, (c+1)*k)`; each
/// unordered pair is joined with `p_intra` inside a cluster and `p_inter`
/// across clusters.
pub fn generate_clustered(
    num_clusters: usize,
    nodes_per_cluster: usize,
    p_intra: f64,
    p_inter: f64,
    seed: u64,
) -> Result<ClusteredGraph> {
    if num_clusters == 0 || nodes_per_cluster == 0 {
        return Err(Error::invalid("cluster count and size must be at least 1"));
    }
    for (name, p) in [("p_intra", p_intra), ("p_inter", p_inter)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("{name}={p} is not a probability")));
        }
    }
    let n = num_clusters
        .checked_mul(nodes_per_cluster)
        .filter(|&n| n <= NodeId::MAX as usize)
        .ok_or_else(|| Error::invalid("too many nodes"))?;
    let mut rng = RngStream::new(seed, 0);
    let mut edges = Vec::new();
    for u in 0..n {
        let cu = u / nodes_per_cluster;
        for v in u + 1..n {
            let p = if v / nodes_per_cluster == cu { p_intra } else { p_inter };
            if p > 0.0 && rng.random::<f64>() < p {
                edges.push((u as NodeId, v as NodeId));
            }
        }
    }
    let graph = Graph::from_edges(n, &edges, false)?;
    let labels = (0..n).map(|v| (v / nodes_per_cluster) as u32).collect();
    Ok(ClusteredGraph {
        graph,
        labels,
        num_clusters,
    })
}

/// Uniform random permutation of `0..n` (old id → new id).
pub fn random_permutation(n: usize, seed: u64) -> Vec<NodeId> {
    let mut perm: Vec<NodeId> = (0..n as NodeId).collect();
    perm.shuffle(&mut RngStream::new(seed, 0));
    perm
}

/// Relabels `g` by a seeded uniform permutation.
pub fn shuffle_ids(g: &Graph, seed: u64) -> Graph {
    g.relabel(&random_permutation(g.num_nodes(), seed))
        .expect("a generated permutation is always valid")
}

impl ClusteredGraph {
    /// Shuffles node ids, carrying the labels along.
    pub fn shuffled(&self, seed: u64) -> ClusteredGraph {
        let perm = random_permutation(self.graph.num_nodes(), seed);
        let graph = self.graph.relabel(&perm).expect("valid permutation");
        let mut labels = vec![0; self.labels.len()];
        for (old, &new) in perm.iter().enumerate() {
            labels[new as usize] = self.labels[old];
        }
        ClusteredGraph {
            graph,
            labels,
            num_clusters: self.num_clusters,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_intra_gives_disjoint_triangles() {
        let cg = generate_clustered(2, 3, 1.0, 0.0, 99).unwrap();
        assert_eq!(cg.labels, vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(
            cg.graph.edges(),
            vec![(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
        );
    }

    #[test]
    fn zero_probabilities_give_isolated_nodes() {
        let cg = generate_clustered(1, 4, 0.0, 0.0, 1).unwrap();
        assert_eq!(cg.graph.num_nodes(), 4);
        assert_eq!(cg.graph.num_edges(), 0);
    }

    #[test]
    fn deterministic_for_seed() {
        let a = generate_clustered(2, 50, 0.3, 0.01, 7).unwrap();
        let b = generate_clustered(2, 50, 0.3, 0.01, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_clustered(2, 50, 0.3, 0.01, 8).unwrap();
        assert_ne!(a.graph, c.graph);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_clustered(0, 3, 0.5, 0.5, 0).is_err());
        assert!(generate_clustered(2, 0, 0.5, 0.5, 0).is_err());
        assert!(generate_clustered(2, 3, 1.5, 0.5, 0).is_err());
        assert!(generate_clustered(2, 3, 0.5, -0.1, 0).is_err());
    }

    #[test]
    fn shuffle_keeps_triangle() {
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)], false).unwrap();
        for seed in 0..5 {
            let s = shuffle_ids(&tri, seed);
            assert_eq!(s.num_nodes(), 3);
            assert_eq!(s.num_edges(), 3);
        }
    }

    #[test]
    fn identity_permutation_is_noop() {
        let g = generate_clustered(2, 10, 0.5, 0.1, 3).unwrap().graph;
        let id: Vec<NodeId> = (0..g.num_nodes() as NodeId).collect();
        assert_eq!(g.relabel(&id).unwrap(), g);
    }

    #[test]
    fn shuffled_labels_follow_nodes() {
        let cg = generate_clustered(3, 5, 1.0, 0.0, 2).unwrap();
        let s = cg.shuffled(11);
        // every edge still joins same-label nodes
        for (u, v) in s.graph.edges() {
            assert_eq!(s.labels[u as usize], s.labels[v as usize]);
        }
    }
}
