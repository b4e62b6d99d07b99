//! Immutable CSR graph storage.
//!
//! A [`Graph`] keeps one row per node in `indices[offsets[v]..offsets[v + 1]]`.
//! Rows are sorted and deduplicated, and undirected graphs store both
//! directions of every edge so a neighbor query is a single contiguous scan.

mod generate;
mod io;
mod stats;

pub use generate::{generate_clustered, random_permutation, shuffle_ids, ClusteredGraph};
pub use io::{load_csr, load_edge_list, parse_edge_list, read_csr, save_csr, write_csr};
pub use stats::{stats, GraphStats};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use std::sync::OnceLock;

use crate::rng::splitmix64;

pub type NodeId = u32;

#[derive(Clone, Debug)]
pub struct Graph {
    num_nodes: usize,
    offsets: Vec<usize>,
    indices: Vec<NodeId>,
    directed: bool,
    fingerprint: OnceLock<u64>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.num_nodes == other.num_nodes
            && self.directed == other.directed
            && self.offsets == other.offsets
            && self.indices == other.indices
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges and self-loops are
    /// dropped; undirected input is symmetrized.
    pub fn from_edges(num_nodes: usize, edges: &[(NodeId, NodeId)], directed: bool) -> Result<Self> {
        if num_nodes > NodeId::MAX as usize {
            return Err(Error::InvalidGraph(format!("{num_nodes} nodes exceed u32 ids")));
        }
        let mut degree = vec![0usize; num_nodes];
        for &(u, v) in edges {
            for x in [u, v] {
                if x as usize >= num_nodes {
                    return Err(Error::InvalidGraph(format!(
                        "node id {x} out of range for {num_nodes} nodes"
                    )));
                }
            }
            if u == v {
                continue;
            }
            degree[u as usize] += 1;
            if !directed {
                degree[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(num_nodes + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..num_nodes].to_vec();
        let mut indices = vec![0; offsets[num_nodes]];
        let mut push = |src: NodeId, dst: NodeId| {
            let c = &mut cursor[src as usize];
            indices[*c] = dst;
            *c += 1;
        };
        for &(u, v) in edges {
            if u == v {
                continue;
            }
            push(u, v);
            if !directed {
                push(v, u);
            }
        }

        // sort + dedup each row, compacting in place
        let mut write = 0;
        let mut new_offsets = Vec::with_capacity(num_nodes + 1);
        new_offsets.push(0);
        for v in 0..num_nodes {
            let (start, end) = (offsets[v], offsets[v + 1]);
            indices[start..end].sort_unstable();
            let mut last = None;
            for i in start..end {
                let x = indices[i];
                if last != Some(x) {
                    indices[write] = x;
                    write += 1;
                    last = Some(x);
                }
            }
            new_offsets.push(write);
        }
        indices.truncate(write);
        Ok(Self {
            num_nodes,
            offsets: new_offsets,
            indices,
            directed,
            fingerprint: OnceLock::new(),
        })
    }

    /// Wraps raw CSR arrays, checking every structural invariant.
    pub fn from_csr(
        num_nodes: usize,
        offsets: Vec<usize>,
        indices: Vec<NodeId>,
        directed: bool,
    ) -> Result<Self> {
        let g = Self {
            num_nodes,
            offsets,
            indices,
            directed,
            fingerprint: OnceLock::new(),
        };
        g.validate()?;
        Ok(g)
    }

    /// Graph with `num_nodes` nodes and no edges.
    pub fn empty(num_nodes: usize) -> Self {
        Self {
            num_nodes,
            offsets: vec![0; num_nodes + 1],
            indices: Vec::new(),
            directed: false,
            fingerprint: OnceLock::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if self.offsets.len() != self.num_nodes + 1 {
            return bad(format!(
                "offsets has length {}, expected {}",
                self.offsets.len(),
                self.num_nodes + 1
            ));
        }
        if self.offsets[0] != 0 || self.offsets[self.num_nodes] != self.indices.len() {
            return bad("offsets must start at 0 and end at the entry count".into());
        }
        for v in 0..self.num_nodes {
            if self.offsets[v] > self.offsets[v + 1] {
                return bad(format!("offsets decrease at node {v}"));
            }
            let row = self.neighbors(v as NodeId);
            if row.windows(2).any(|w| w[0] >= w[1]) {
                return bad(format!("row {v} is not strictly ascending"));
            }
            if let Some(&x) = row.last() {
                if x as usize >= self.num_nodes {
                    return bad(format!("row {v} references node {x}"));
                }
            }
        }
        if !self.directed {
            for v in 0..self.num_nodes as NodeId {
                for &u in self.neighbors(v) {
                    if !self.has_edge(u, v) {
                        return bad(format!("undirected graph missing reverse edge {u}->{v}"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of stored neighbor-list entries (twice the edge count when undirected).
    pub fn num_entries(&self) -> usize {
        self.indices.len()
    }

    pub fn num_edges(&self) -> usize {
        if self.directed {
            self.indices.len()
        } else {
            self.indices.len() / 2
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn indices(&self) -> &[NodeId] {
        &self.indices
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.indices[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Position of `v`'s row in the flat neighbor array.
    #[inline]
    pub fn row_start(&self, v: NodeId) -> usize {
        self.offsets[v as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Undirected edges as `(u, v)` with `u < v`; every stored entry when directed.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for u in 0..self.num_nodes as NodeId {
            for &v in self.neighbors(u) {
                if self.directed || u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.num_nodes as NodeId).all(|u| self.neighbors(u).iter().all(|&v| self.has_edge(v, u)))
    }

    /// Applies `perm` (old id → new id) to every node.
    pub fn relabel(&self, perm: &[NodeId]) -> Result<Self> {
        if perm.len() != self.num_nodes {
            return Err(Error::invalid(format!(
                "permutation has length {}, graph has {} nodes",
                perm.len(),
                self.num_nodes
            )));
        }
        let mut seen = vec![false; self.num_nodes];
        for &p in perm {
            if p as usize >= self.num_nodes || std::mem::replace(&mut seen[p as usize], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        let edges: Vec<_> = (0..self.num_nodes as NodeId)
            .flat_map(|u| self.neighbors(u).iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| self.directed || u < v)
            .map(|(u, v)| (perm[u as usize], perm[v as usize]))
            .collect();
        Self::from_edges(self.num_nodes, &edges, self.directed)
    }

    /// Stable 64-bit fingerprint of the CSR layout, computed once and kept.
    pub fn fingerprint(&self) -> u64 {
        *self.fingerprint.get_or_init(|| {
            let mut lanes = [self.num_nodes as u64, u64::from(self.directed), 1, 2];
            let mut feed = |i: usize, w: u64| {
                lanes[i & 3] = (lanes[i & 3] ^ w).wrapping_mul(0x9e37_79b9_7f4a_7c15).rotate_left(31);
            };
            for (i, &o) in self.offsets.iter().enumerate() {
                feed(i, o as u64);
            }
            let mut pairs = self.indices.chunks_exact(2);
            for (i, p) in pairs.by_ref().enumerate() {
                feed(i, u64::from(p[0]) | u64::from(p[1]) << 32);
            }
            for &x in pairs.remainder() {
                feed(0, u64::from(x) | 1 << 63);
            }
            lanes.iter().fold(self.indices.len() as u64, |h, &l| splitmix64(h ^ l))
        })
    }
}

/// A sorted set of distinct node ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeSet {
    ids: Vec<NodeId>,
}

impl NodeSet {
    /// Sorts and deduplicates `ids`.
    pub fn new(mut ids: Vec<NodeId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        Self { ids }
    }

    pub fn from_sorted(ids: Vec<NodeId>) -> Result<Self> {
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("node set must be strictly ascending"));
        }
        Ok(Self { ids })
    }

    pub fn all(num_nodes: usize) -> Self {
        Self {
            ids: (0..num_nodes as NodeId).collect(),
        }
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn into_vec(self) -> Vec<NodeId> {
        self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.ids, &other.ids);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        NodeSet { ids: out }
    }

    pub fn check_within(&self, num_nodes: usize) -> Result<()> {
        match self.ids.last() {
            Some(&x) if x as usize >= num_nodes => Err(Error::invalid(format!(
                "node {x} out of range for {num_nodes} nodes"
            ))),
            _ => Ok(()),
        }
    }
}

/// Relabeling between original ids and dense local ids.
///
/// Local id `i` is the rank of the original id in the sorted node set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdMap {
    local_to_global: Vec<NodeId>,
}

impl IdMap {
    pub fn new(nodes: &NodeSet) -> Self {
        Self {
            local_to_global: nodes.ids().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.local_to_global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local_to_global.is_empty()
    }

    pub fn to_global(&self, local: NodeId) -> NodeId {
        self.local_to_global[local as usize]
    }

    pub fn to_local(&self, global: NodeId) -> Option<NodeId> {
        self.local_to_global
            .binary_search(&global)
            .ok()
            .map(|i| i as NodeId)
    }

    pub fn globals(&self) -> &[NodeId] {
        &self.local_to_global
    }
}

/// Subgraph on `nodes`, relabeled by rank. Returns the graph and the id mapping.
pub fn induce_subgraph(g: &Graph, nodes: &NodeSet) -> Result<(Graph, IdMap)> {
    induce_subgraph_traced(g, nodes, &mut |_| {})
}

/// Like [`induce_subgraph`], reporting every neighbor id read while scanning rows.
pub(crate) fn induce_subgraph_traced(
    g: &Graph,
    nodes: &NodeSet,
    touch: &mut dyn FnMut(NodeId),
) -> Result<(Graph, IdMap)> {
    if nodes.is_empty() {
        return Err(Error::invalid("cannot induce a subgraph on an empty node set"));
    }
    nodes.check_within(g.num_nodes())?;
    let map = IdMap::new(nodes);
    let mut offsets = Vec::with_capacity(nodes.len() + 1);
    offsets.push(0);
    let mut indices = Vec::new();
    for &v in nodes.ids() {
        for &u in g.neighbors(v) {
            touch(u);
            if let Some(local) = map.to_local(u) {
                indices.push(local);
            }
        }
        offsets.push(indices.len());
    }
    // rows stay sorted: rank order preserves id order
    let sub = Graph {
        num_nodes: nodes.len(),
        offsets,
        indices,
        directed: g.directed,
        fingerprint: OnceLock::new(),
    };
    Ok((sub, map))
}
