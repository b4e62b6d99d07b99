//! Locality-aware sampling weights.
//!
//! A node is a good sampling target when its neighbors sit next to each
//! other in memory. For a node with sorted neighbor ids `r`, the *good
//! neighbors* are the contiguous run `g[i] = r[0] + i` of the same length,
//! and the similarity between the two is the dot-product ratio
//!
//! ```text
//! sim(r) = Σ r[i]·g[i] / Σ r[i]²
//! ```
//!
//! Since `g[i] <= r[i]` for a strictly ascending `r`, `sim <= 1`, with
//! equality exactly when `r` is already contiguous. [`construct_locality`]
//! marks a node eligible (weight 1) when its degree is at least `n` and its
//! similarity is at least `s`; samplers then draw uniformly among eligible
//! nodes. Layer-wise samplers use degree-proportional weights instead
//! ([`layer_weights`]) plus partial reuse of the layer above
//! ([`augment_with_parents`]).
//!
//! The weights depend only on the adjacency, so they are computed once per
//! graph and cached on disk ([`save_weights`] / [`load_weights`]), keyed by
//! the graph fingerprint.
//!
//! Similarity is sensitive to the absolute magnitude of ids: the same gaps
//! cost less when the ids are large. This is inherent to the ratio and is
//! left uncorrected.

use std::fs;
use std::path::Path;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::codec::{finish, Reader};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::rng::RngStream;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalityParams {
    /// Degree filter `n`: nodes with fewer neighbors are never eligible.
    pub min_neighbors: usize,
    /// Similarity threshold `s`.
    pub similarity_threshold: f64,
    /// Fraction of the layer above added to a layer-wise candidate pool.
    pub parent_reuse_ratio: f64,
}

impl Default for LocalityParams {
    fn default() -> Self {
        Self {
            min_neighbors: 2,
            similarity_threshold: 0.9,
            parent_reuse_ratio: 0.5,
        }
    }
}

impl LocalityParams {
    pub fn new(min_neighbors: usize, similarity_threshold: f64) -> Self {
        Self {
            min_neighbors,
            similarity_threshold,
            ..Self::default()
        }
    }

    pub fn with_parent_reuse(mut self, rho: f64) -> Self {
        self.parent_reuse_ratio = rho;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_neighbors == 0 || self.min_neighbors > u32::MAX as usize {
            return Err(Error::invalid("min_neighbors must be in 1..=u32::MAX"));
        }
        if !(0.0..=1.0).contains(&self.similarity_threshold) {
            return Err(Error::invalid(format!(
                "similarity threshold {} outside [0, 1]",
                self.similarity_threshold
            )));
        }
        if !(0.0..=1.0).contains(&self.parent_reuse_ratio) {
            return Err(Error::invalid(format!(
                "parent reuse ratio {} outside [0, 1]",
                self.parent_reuse_ratio
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// Every weight is 0 or 1.
    Binary,
    /// Weights proportional to degree.
    Proportional,
}

/// Per-node sampling weights `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalityWeights {
    pub mode: WeightMode,
    pub weights: Vec<f64>,
    pub params: LocalityParams,
    pub graph_fingerprint: u64,
    /// Set by [`layer_weights`] when every candidate was isolated and the
    /// weights fell back to uniform.
    pub uniform_fallback: bool,
}

impl LocalityWeights {
    /// Weight 1 everywhere: the vanilla, locality-unaware sampler.
    pub fn uniform(g: &Graph) -> Self {
        Self {
            mode: WeightMode::Binary,
            weights: vec![1.0; g.num_nodes()],
            params: LocalityParams::default(),
            graph_fingerprint: g.fingerprint(),
            uniform_fallback: false,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn weight(&self, v: NodeId) -> f64 {
        self.weights[v as usize]
    }

    pub fn eligible_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w > 0.0).count()
    }

    pub fn eligible_fraction(&self) -> f64 {
        if self.weights.is_empty() {
            0.0
        } else {
            self.eligible_count() as f64 / self.weights.len() as f64
        }
    }

    /// Weights scaled to sum to 1, or `None` when they are all zero.
    pub fn normalized(&self) -> Option<Vec<f64>> {
        let total: f64 = self.weights.iter().sum();
        (total > 0.0).then(|| self.weights.iter().map(|w| w / total).collect())
    }
}

/// Contiguous run of the same length anchored at the smallest neighbor.
pub fn good_neighbor_generation(neighbors: &[NodeId]) -> Result<Vec<NodeId>> {
    let &anchor = neighbors
        .first()
        .ok_or_else(|| Error::invalid("cannot generate good neighbors for an empty list"))?;
    if neighbors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("neighbor ids must be strictly ascending"));
    }
    Ok((0..neighbors.len() as NodeId).map(|i| anchor + i).collect())
}

/// Dot-product ratio `Σ real[i]·good[i] / Σ real[i]²`.
///
/// Sums are accumulated exactly in integers, so a contiguous run yields
/// exactly 1.0. `real = [0]` has a zero denominator and is defined as 1.
pub fn similarity(real: &[NodeId], good: &[NodeId]) -> Result<f64> {
    if real.is_empty() {
        return Err(Error::invalid("similarity of an empty sequence"));
    }
    if real.len() != good.len() {
        return Err(Error::invalid(format!(
            "sequence lengths differ: {} real vs {} good",
            real.len(),
            good.len()
        )));
    }
    let (num, den) = real
        .iter()
        .zip(good)
        .fold((0u128, 0u128), |(n, d), (&r, &g)| {
            let r = u128::from(r);
            (n + r * u128::from(g), d + r * r)
        });
    Ok(ratio(num, den))
}

fn ratio(num: u128, den: u128) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Similarity of an already sorted, non-empty row without materializing the run.
fn row_similarity(row: &[NodeId]) -> f64 {
    let anchor = u128::from(row[0]);
    let (num, den) = row
        .iter()
        .enumerate()
        .fold((0u128, 0u128), |(n, d), (i, &r)| {
            let r = u128::from(r);
            (n + r * (anchor + i as u128), d + r * r)
        });
    ratio(num, den)
}

/// Similarity of `v`'s neighbor row, `None` for isolated nodes.
pub fn node_similarity(g: &Graph, v: NodeId) -> Option<f64> {
    let row = g.neighbors(v);
    (!row.is_empty()).then(|| row_similarity(row))
}

fn map_nodes<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(NodeId) -> f64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n as NodeId).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n as NodeId).map(f).collect()
    }
}

/// Binary weights: 1 iff `degree >= n` and similarity `>= s`.
///
/// An all-zero result is legal; samplers fall back to uniform draws.
pub fn construct_locality(g: &Graph, params: &LocalityParams) -> Result<LocalityWeights> {
    params.validate()?;
    let weights = map_nodes(g.num_nodes(), |v| {
        let row = g.neighbors(v);
        let eligible = row.len() >= params.min_neighbors
            && row_similarity(row) >= params.similarity_threshold;
        if eligible {
            1.0
        } else {
            0.0
        }
    });
    Ok(LocalityWeights {
        mode: WeightMode::Binary,
        weights,
        params: *params,
        graph_fingerprint: g.fingerprint(),
        uniform_fallback: false,
    })
}

/// Per-node similarity for every non-isolated node, in id order.
pub fn similarities(g: &Graph) -> Vec<Option<f64>> {
    (0..g.num_nodes() as NodeId).map(|v| node_similarity(g, v)).collect()
}

/// Mean similarity over non-isolated nodes (0 when there are none).
pub fn mean_similarity(g: &Graph) -> f64 {
    let sims: Vec<f64> = similarities(g).into_iter().flatten().collect();
    if sims.is_empty() {
        0.0
    } else {
        sims.iter().sum::<f64>() / sims.len() as f64
    }
}

/// Degree of each candidate, or 1 each when every candidate is isolated.
/// The flag reports the fallback.
pub(crate) fn candidate_degree_weights(g: &Graph, candidates: &[NodeId]) -> (Vec<f64>, bool) {
    let w: Vec<f64> = candidates.iter().map(|&v| g.degree(v) as f64).collect();
    if w.iter().all(|&x| x == 0.0) {
        (vec![1.0; candidates.len()], true)
    } else {
        (w, false)
    }
}

/// Degree-proportional weights over `candidates`, zero elsewhere.
pub fn layer_weights(g: &Graph, candidates: &NodeSet) -> Result<LocalityWeights> {
    if candidates.is_empty() {
        return Err(Error::invalid("layer weights need at least one candidate"));
    }
    candidates.check_within(g.num_nodes())?;
    let (w, fallback) = candidate_degree_weights(g, candidates.ids());
    let mut weights = vec![0.0; g.num_nodes()];
    for (&v, x) in candidates.ids().iter().zip(w) {
        weights[v as usize] = x;
    }
    Ok(LocalityWeights {
        mode: WeightMode::Proportional,
        weights,
        params: LocalityParams::default(),
        graph_fingerprint: g.fingerprint(),
        uniform_fallback: fallback,
    })
}

/// Adds `⌈rho·|parents|⌉` parents, drawn uniformly without replacement, to
/// the candidate set.
pub fn augment_with_parents(
    candidates: &NodeSet,
    parents: &NodeSet,
    rho: f64,
    rng: &mut RngStream,
) -> Result<NodeSet> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::invalid(format!("rho={rho} outside [0, 1]")));
    }
    let take = ((rho * parents.len() as f64).ceil() as usize).min(parents.len());
    if take == 0 {
        return Ok(candidates.clone());
    }
    let picked: Vec<NodeId> = index::sample(rng, parents.len(), take)
        .into_iter()
        .map(|i| parents.ids()[i])
        .collect();
    Ok(candidates.union(&NodeSet::new(picked)))
}

const WEIGHTS_MAGIC: &[u8; 4] = b"GSLW";
const WEIGHTS_VERSION: u32 = 1;

pub fn write_weights(w: &LocalityWeights) -> Vec<u8> {
    let mut buf = Vec::with_capacity(41 + 8 * w.weights.len() + 4);
    buf.extend_from_slice(WEIGHTS_MAGIC);
    buf.extend_from_slice(&WEIGHTS_VERSION.to_le_bytes());
    buf.push(match w.mode {
        WeightMode::Binary => 0,
        WeightMode::Proportional => 1,
    });
    buf.extend_from_slice(&(w.params.min_neighbors as u32).to_le_bytes());
    buf.extend_from_slice(&w.params.similarity_threshold.to_le_bytes());
    buf.extend_from_slice(&w.params.parent_reuse_ratio.to_le_bytes());
    buf.extend_from_slice(&w.graph_fingerprint.to_le_bytes());
    for x in &w.weights {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    finish(buf)
}

pub fn read_weights(bytes: &[u8], g: &Graph) -> Result<LocalityWeights> {
    let mut r = Reader::open(bytes, WEIGHTS_MAGIC)?;
    let version = r.u32()?;
    if version != WEIGHTS_VERSION {
        return Err(Error::Version {
            found: version,
            expected: WEIGHTS_VERSION,
        });
    }
    let mode = match r.u8()? {
        0 => WeightMode::Binary,
        1 => WeightMode::Proportional,
        m => return Err(Error::Format(format!("unknown weight mode {m}"))),
    };
    let params = LocalityParams {
        min_neighbors: r.u32()? as usize,
        similarity_threshold: r.f64()?,
        parent_reuse_ratio: r.f64()?,
    };
    let stored = r.u64()?;
    let actual = g.fingerprint();
    if stored != actual {
        return Err(Error::Fingerprint { stored, actual });
    }
    if r.remaining() != 8 * g.num_nodes() {
        return Err(Error::Format(format!(
            "weight payload is {} bytes, graph needs {}",
            r.remaining(),
            8 * g.num_nodes()
        )));
    }
    let weights = (0..g.num_nodes()).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    // proportional weights are degrees unless every candidate was isolated
    let uniform_fallback = mode == WeightMode::Proportional
        && weights
            .iter()
            .enumerate()
            .all(|(v, &x)| x == 0.0 || g.degree(v as NodeId) == 0);
    Ok(LocalityWeights {
        mode,
        weights,
        params,
        graph_fingerprint: stored,
        uniform_fallback,
    })
}

pub fn save_weights(w: &LocalityWeights, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    crate::codec::write_atomic(path, &write_weights(w))
}

pub fn load_weights(path: impl AsRef<Path>, g: &Graph) -> Result<LocalityWeights> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_weights(&bytes, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_clustered;

    #[test]
    fn good_neighbors() {
        assert_eq!(good_neighbor_generation(&[5, 6, 7]).unwrap(), vec![5, 6, 7]);
        assert_eq!(good_neighbor_generation(&[5, 9, 13]).unwrap(), vec![5, 6, 7]);
        assert_eq!(good_neighbor_generation(&[2]).unwrap(), vec![2]);
        assert!(good_neighbor_generation(&[]).is_err());
        assert!(good_neighbor_generation(&[3, 3]).is_err());
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(similarity(&[5, 6, 7], &[5, 6, 7]).unwrap(), 1.0);
        let s = similarity(&[5, 9, 13], &[5, 6, 7]).unwrap();
        assert!((s - 170.0 / 275.0).abs() < 1e-12);
        assert_eq!(similarity(&[0], &[0]).unwrap(), 1.0);
        assert!(similarity(&[1, 2], &[1]).is_err());
        assert!(similarity(&[], &[]).is_err());
    }

    #[test]
    fn row_similarity_matches_public_form() {
        for row in [&[5u32, 9, 13][..], &[1, 7, 20], &[0, 1, 1000], &[4]] {
            let gn = good_neighbor_generation(row).unwrap();
            assert_eq!(row_similarity(row), similarity(row, &gn).unwrap());
        }
    }

    fn star_like(rows: &[(NodeId, &[NodeId])], n: usize) -> Graph {
        let edges: Vec<_> = rows
            .iter()
            .flat_map(|(v, ns)| ns.iter().map(move |&u| (*v, u)))
            .collect();
        Graph::from_edges(n, &edges, true).unwrap()
    }

    #[test]
    fn construct_locality_examples() {
        // node 0: {4,5,6}; node 1: {1..} not allowed self, use node 2: {1,7,20}; node 3: one neighbor
        let g = star_like(&[(0, &[4, 5, 6]), (2, &[1, 7, 20]), (3, &[8])], 21);
        let w = construct_locality(&g, &LocalityParams::new(2, 0.9)).unwrap();
        assert_eq!(w.weight(0), 1.0);
        assert_eq!(w.weight(2), 0.0);
        assert_eq!(w.weight(3), 0.0);
        let sb = node_similarity(&g, 2).unwrap();
        assert!((sb - 75.0 / 450.0).abs() < 1e-12);
        assert_eq!(w.mode, WeightMode::Binary);
        // s = 0 and n = 1 admits every non-isolated node
        let all = construct_locality(&g, &LocalityParams::new(1, 0.0)).unwrap();
        assert_eq!(all.eligible_count(), 3);
    }

    #[test]
    fn params_are_validated() {
        let g = Graph::empty(2);
        assert!(construct_locality(&g, &LocalityParams::new(0, 0.5)).is_err());
        assert!(construct_locality(&g, &LocalityParams::new(1, 1.5)).is_err());
        assert!(LocalityParams::new(1, 0.5).with_parent_reuse(2.0).validate().is_err());
    }

    #[test]
    fn contiguous_clusters_are_eligible() {
        // p_intra = 1: each node's neighbors are its cluster minus itself,
        // contiguous only for the first and last node of each cluster
        let cg = generate_clustered(3, 5, 1.0, 0.0, 0).unwrap();
        let w = construct_locality(&cg.graph, &LocalityParams::new(2, 1.0)).unwrap();
        for v in 0..15u32 {
            let row = cg.graph.neighbors(v);
            let contiguous = row.windows(2).all(|p| p[1] == p[0] + 1);
            assert_eq!(w.weight(v) == 1.0, contiguous, "node {v}");
        }
    }

    #[test]
    fn layer_weights_examples() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)], false).unwrap();
        let w = layer_weights(&path, &NodeSet::all(3)).unwrap();
        assert_eq!(w.weights, vec![1.0, 2.0, 1.0]);
        assert_eq!(w.normalized().unwrap(), vec![0.25, 0.5, 0.25]);
        assert!(!w.uniform_fallback);

        let one = layer_weights(&path, &NodeSet::new(vec![2])).unwrap();
        assert_eq!(one.normalized().unwrap(), vec![0.0, 0.0, 1.0]);

        let iso = layer_weights(&Graph::empty(3), &NodeSet::new(vec![0, 2])).unwrap();
        assert!(iso.uniform_fallback);
        assert_eq!(iso.weights, vec![1.0, 0.0, 1.0]);

        assert!(layer_weights(&path, &NodeSet::default()).is_err());
    }

    #[test]
    fn augmentation_cardinality() {
        let cands = NodeSet::new(vec![0]);
        let parents = NodeSet::new(vec![1, 2, 3, 4]);
        for seed in 0..200 {
            let mut rng = RngStream::new(seed, 0);
            let out = augment_with_parents(&cands, &parents, 0.5, &mut rng).unwrap();
            assert_eq!(out.len(), 3);
            assert!(out.contains(0));
        }
        let mut rng = RngStream::new(1, 0);
        assert_eq!(augment_with_parents(&cands, &parents, 0.0, &mut rng).unwrap(), cands);
        assert_eq!(
            augment_with_parents(&cands, &parents, 1.0, &mut rng).unwrap().ids(),
            &[0, 1, 2, 3, 4]
        );
        assert!(augment_with_parents(&cands, &parents, 1.1, &mut rng).is_err());
    }

    #[test]
    fn weights_round_trip() {
        let cg = generate_clustered(2, 20, 0.4, 0.05, 3).unwrap();
        let w = construct_locality(&cg.graph, &LocalityParams::new(2, 0.5)).unwrap();
        assert_eq!(read_weights(&write_weights(&w), &cg.graph).unwrap(), w);
        let lw = layer_weights(&cg.graph, &NodeSet::new(vec![0, 5, 9])).unwrap();
        assert_eq!(read_weights(&write_weights(&lw), &cg.graph).unwrap(), lw);
    }

    #[test]
    fn weights_reject_other_graph() {
        let g = generate_clustered(2, 20, 0.4, 0.05, 3).unwrap().graph;
        let h = generate_clustered(2, 20, 0.4, 0.05, 4).unwrap().graph;
        let w = construct_locality(&g, &LocalityParams::default()).unwrap();
        assert!(matches!(
            read_weights(&write_weights(&w), &h),
            Err(Error::Fingerprint { .. })
        ));
    }

    #[test]
    fn weights_reject_old_version() {
        let g = Graph::from_edges(3, &[(0, 1)], false).unwrap();
        let w = construct_locality(&g, &LocalityParams::default()).unwrap();
        let mut bytes = write_weights(&w);
        bytes.truncate(bytes.len() - 4);
        bytes[4..8].copy_from_slice(&0u32.to_le_bytes());
        let bytes = finish(bytes);
        assert!(matches!(
            read_weights(&bytes, &g),
            Err(Error::Version { found: 0, expected: 1 })
        ));
    }

    #[test]
    fn weights_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.gslw");
        let g = generate_clustered(2, 10, 0.5, 0.1, 1).unwrap().graph;
        let w = construct_locality(&g, &LocalityParams::new(2, 0.3)).unwrap();
        save_weights(&w, &p).unwrap();
        assert_eq!(load_weights(&p, &g).unwrap(), w);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn thread_count_does_not_change_weights() {
        let g = crate::graph::shuffle_ids(&generate_clustered(4, 64, 0.2, 0.01, 5).unwrap().graph, 9);
        let params = LocalityParams::new(2, 0.4);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| construct_locality(&g, &params).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(8));
        assert_eq!(one, construct_locality(&g, &params).unwrap());
    }
}
