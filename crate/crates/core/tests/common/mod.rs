#![allow(dead_code)]

use gsampler::graph::{Graph, NodeId};
use proptest::prelude::*;

/// Random undirected graphs with up to `max_nodes` nodes.
pub fn graph(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        let max_edges = n * (n - 1) / 2;
        prop::collection::vec((0..n as NodeId, 0..n as NodeId), 0..=max_edges.min(300))
            .prop_map(move |edges| Graph::from_edges(n, &edges, false).unwrap())
    })
}

/// Dense adjacency as a boolean matrix.
pub fn dense(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.num_nodes();
    let mut a = vec![vec![false; n]; n];
    for (v, row) in a.iter_mut().enumerate() {
        for &u in g.neighbors(v as NodeId) {
            row[u as usize] = true;
        }
    }
    a
}

/// Triangles and mean local clustering by enumerating every triple.
pub fn brute_triangles(g: &Graph) -> (u64, f64) {
    let a = dense(g);
    let n = a.len();
    let mut total = 0;
    let mut local = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if a[i][j] && a[j][k] && a[i][k] {
                    total += 1;
                    local[i] += 1;
                    local[j] += 1;
                    local[k] += 1;
                }
            }
        }
    }
    let cc: f64 = (0..n)
        .map(|v| {
            let d = a[v].iter().filter(|&&b| b).count() as f64;
            if d < 2.0 {
                0.0
            } else {
                2.0 * local[v] as f64 / (d * (d - 1.0))
            }
        })
        .sum();
    (total, if n == 0 { 0.0 } else { cc / n as f64 })
}

/// Edges among `nodes` by testing every pair, in local ids.
pub fn brute_induce(g: &Graph, nodes: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    let a = dense(g);
    let mut out = Vec::new();
    for (i, &u) in nodes.iter().enumerate() {
        for (j, &v) in nodes.iter().enumerate().skip(i + 1) {
            if a[u as usize][v as usize] {
                out.push((i as NodeId, j as NodeId));
            }
        }
    }
    out
}

pub fn well_formed(g: &Graph) -> bool {
    let o = g.offsets();
    o.len() == g.num_nodes() + 1
        && o[0] == 0
        && o.windows(2).all(|w| w[0] <= w[1])
        && o[g.num_nodes()] == g.indices().len()
        && g.indices().iter().all(|&u| (u as usize) < g.num_nodes())
        && (0..g.num_nodes() as NodeId).all(|v| g.neighbors(v).windows(2).all(|w| w[0] < w[1]))
}
