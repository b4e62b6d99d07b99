use serde::{Deserialize, Serialize};

use super::{Graph, NodeId};

/// Dataset summary: size, average/90th-percentile degree and neighbor reuse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub num_nodes: usize,
    pub num_edges: usize,
    /// Mean degree, rounded half up.
    pub ann: usize,
    /// Smallest degree bound covering at least 90% of nodes.
    pub mnn: usize,
    /// Fraction of neighbor-list entries whose target appears in two or more lists.
    pub nrr: f64,
}

pub fn stats(g: &Graph) -> GraphStats {
    let n = g.num_nodes();
    let entries = g.num_entries();
    // round-half-up of entries / n in integer arithmetic
    let ann = if n == 0 { 0 } else { (2 * entries + n) / (2 * n) };

    let mut degrees: Vec<usize> = (0..n as NodeId).map(|v| g.degree(v)).collect();
    degrees.sort_unstable();
    // smallest d with |{v : deg v <= d}| >= 0.9 n, i.e. the ceil(0.9 n)-th smallest degree
    let mnn = if n == 0 {
        0
    } else {
        let covered = (9 * n).div_ceil(10);
        degrees[covered.max(1) - 1]
    };

    // rows are deduplicated, so the in-degree of t counts distinct lists containing t
    let mut listed_in = vec![0u32; n];
    for &t in g.indices() {
        listed_in[t as usize] += 1;
    }
    let reused = g
        .indices()
        .iter()
        .filter(|&&t| listed_in[t as usize] >= 2)
        .count();
    let nrr = if entries == 0 {
        0.0
    } else {
        reused as f64 / entries as f64
    };

    GraphStats {
        num_nodes: n,
        num_edges: g.num_edges(),
        ann,
        mnn,
        nrr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_stats() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], false).unwrap();
        let s = stats(&g);
        assert_eq!((s.num_nodes, s.num_edges, s.ann, s.mnn), (3, 2, 1, 2));
        assert_eq!(s.nrr, 0.5);
    }

    #[test]
    fn triangle_stats() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)], false).unwrap();
        let s = stats(&g);
        assert_eq!((s.ann, s.mnn), (2, 2));
        assert_eq!(s.nrr, 1.0);
    }

    #[test]
    fn isolated_stats() {
        let s = stats(&Graph::empty(4));
        assert_eq!((s.num_edges, s.ann, s.mnn), (0, 0, 0));
        assert_eq!(s.nrr, 0.0);
    }

    #[test]
    fn ann_rounds_half_up() {
        // star with 3 leaves: 6 entries / 4 nodes = 1.5 -> 2
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)], false).unwrap();
        assert_eq!(stats(&g).ann, 2);
        // path of 4: 6 / 4 = 1.5 -> 2 ; path of 5: 8 / 5 = 1.6 -> 2 ; 2 nodes one edge: 1
        let g = Graph::from_edges(2, &[(0, 1)], false).unwrap();
        assert_eq!(stats(&g).ann, 1);
    }

    #[test]
    fn mnn_is_ninetieth_percentile() {
        // nine leaves of degree 1 and a hub of degree 9: 90% have degree <= 1
        let edges: Vec<_> = (1..10).map(|v| (0, v)).collect();
        let g = Graph::from_edges(10, &edges, false).unwrap();
        assert_eq!(stats(&g).mnn, 1);
        // 11 nodes: ceil(9.9) = 10 nodes must be covered, the hub is the 11th
        let edges: Vec<_> = (1..11).map(|v| (0, v)).collect();
        let g = Graph::from_edges(11, &edges, false).unwrap();
        assert_eq!(stats(&g).mnn, 1);
    }

    #[test]
    fn matching_has_no_reuse() {
        let g = Graph::from_edges(6, &[(0, 1), (2, 3), (4, 5)], false).unwrap();
        assert_eq!(stats(&g).nrr, 0.0);
    }
}
