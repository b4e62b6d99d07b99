use super::choice::PreparedChoice;
use super::{union_map, Adjacency, Batch, Block, Category, SampleResult, SamplerConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::locality::LocalityWeights;
use crate::rng::RngStream;

/// Node-wise sampling over `config.fanouts.len()` hops.
///
/// Each frontier node draws `min(fanout, degree)` distinct neighbors,
/// weighted by `weights`. If fewer neighbors are eligible than requested,
/// all eligible ones are taken and the rest are filled uniformly from the
/// ineligible ones (counted as a fallback). `layers[h + 1]` is the sorted
/// union of `layers[h]` and everything it sampled, so every node can
/// aggregate from itself in the next layer.
pub fn node_wise_sample(
    g: &Graph,
    batch: &Batch,
    config: &SamplerConfig,
    weights: &LocalityWeights,
    rng: &mut RngStream,
) -> Result<SampleResult> {
    if config.category != Category::NodeWise || config.fanouts.is_empty() {
        return Err(Error::invalid("node-wise sampling needs a node_wise config with fanouts"));
    }
    if batch.node_ids.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    if let Some(&v) = batch.node_ids.iter().find(|&&v| v as usize >= g.num_nodes()) {
        return Err(Error::invalid(format!("batch node {v} out of range")));
    }

    let mut layers = vec![batch.node_ids.clone()];
    let mut blocks = Vec::with_capacity(config.fanouts.len());
    let mut trace = Vec::new();
    let mut fallback_count = 0;
    let mut warnings = Vec::new();

    for (hop, &fanout) in config.fanouts.iter().enumerate() {
        let frontier = &layers[hop];
        let mut picks: Vec<Vec<NodeId>> = Vec::with_capacity(frontier.len());
        let mut isolated = 0;
        for &v in frontier {
            let row = g.neighbors(v);
            trace.extend(row.iter().map(|&u| u64::from(u)));
            if row.is_empty() {
                isolated += 1;
                picks.push(Vec::new());
                continue;
            }
            let k = fanout.min(row.len());
            let (mut chosen, fell_back) = draw_neighbors(row, weights, k, rng)?;
            fallback_count += usize::from(fell_back);
            chosen.sort_unstable();
            picks.push(chosen);
        }
        if isolated > 0 {
            warnings.push(format!("hop {hop}: {isolated} frontier node(s) without neighbors"));
        }

        let mut next: Vec<NodeId> = frontier.iter().chain(picks.iter().flatten()).copied().collect();
        next.sort_unstable();
        next.dedup();

        let mut block = Block {
            offsets: Vec::with_capacity(frontier.len() + 1),
            sources: Vec::new(),
        };
        block.offsets.push(0);
        for p in &picks {
            block
                .sources
                .extend(p.iter().map(|u| next.binary_search(u).unwrap() as u32));
            block.offsets.push(block.sources.len());
        }
        blocks.push(block);
        layers.push(next);
    }

    let id_map = union_map(&layers);
    Ok(SampleResult {
        category: Category::NodeWise,
        batch_index: batch.batch_index,
        layers,
        adjacency: Adjacency::Layered(blocks),
        id_map,
        access_trace: trace,
        fallback_count,
        warnings,
    })
}

/// `k <= row.len()` distinct neighbors. Returns whether a uniform fill was needed.
fn draw_neighbors(
    row: &[NodeId],
    weights: &LocalityWeights,
    k: usize,
    rng: &mut RngStream,
) -> Result<(Vec<NodeId>, bool)> {
    let prepared = PreparedChoice::new(row, weights)?;
    if prepared.fell_back() || k <= prepared.support_len() {
        return Ok((prepared.draw(k, false, rng)?, prepared.fell_back()));
    }
    let eligible = prepared.support_len();
    let mut chosen = prepared.draw(eligible, false, rng)?;
    let rest: Vec<NodeId> = row
        .iter()
        .copied()
        .filter(|&u| weights.weight(u) <= 0.0)
        .collect();
    let fill = PreparedChoice::new(&rest, weights)?;
    debug_assert!(fill.fell_back());
    chosen.extend(fill.draw(k - eligible, false, rng)?);
    Ok((chosen, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locality::{LocalityParams, WeightMode};

    fn star() -> Graph {
        Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)], false).unwrap()
    }

    fn only(v: usize, n: usize) -> LocalityWeights {
        let mut w = vec![0.0; n];
        w[v] = 1.0;
        LocalityWeights {
            mode: WeightMode::Binary,
            weights: w,
            params: LocalityParams::default(),
            graph_fingerprint: 0,
            uniform_fallback: false,
        }
    }

    fn batch(ids: &[NodeId]) -> Batch {
        Batch {
            node_ids: ids.to_vec(),
            batch_index: 0,
        }
    }

    #[test]
    fn star_fanout_two_uniform() {
        let g = star();
        let cfg = SamplerConfig::node_wise(1, vec![2], 0);
        let w = LocalityWeights::uniform(&g);
        for s in 0..50 {
            let r = node_wise_sample(&g, &batch(&[0]), &cfg, &w, &mut RngStream::new(s, 0)).unwrap();
            let block = &r.blocks().unwrap()[0];
            let picked: Vec<NodeId> = block.row(0).iter().map(|&i| r.layers[1][i as usize]).collect();
            assert_eq!(picked.len(), 2);
            assert!(picked.iter().all(|&u| (1..=3).contains(&u)));
            assert_ne!(picked[0], picked[1]);
            assert_eq!(r.fallback_count, 0);
        }
    }

    #[test]
    fn star_single_eligible_leaf() {
        let g = star();
        let cfg = SamplerConfig::node_wise(1, vec![2], 0);
        let w = only(2, 4);
        let mut seen_other = [false; 4];
        for s in 0..100 {
            let r = node_wise_sample(&g, &batch(&[0]), &cfg, &w, &mut RngStream::new(s, 0)).unwrap();
            let block = &r.blocks().unwrap()[0];
            let picked: Vec<NodeId> = block.row(0).iter().map(|&i| r.layers[1][i as usize]).collect();
            // admissible outcomes: {2, 1} or {2, 3}
            assert!(picked == vec![1, 2] || picked == vec![2, 3], "{picked:?}");
            assert_eq!(r.fallback_count, 1);
            seen_other[picked.iter().find(|&&u| u != 2).copied().unwrap() as usize] = true;
        }
        assert!(seen_other[1] && seen_other[3]);
    }

    #[test]
    fn full_fanout_takes_every_neighbor() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (1, 3), (2, 4), (4, 5), (1, 5)], false).unwrap();
        let cfg = SamplerConfig::node_wise(2, vec![6, 6], 0);
        let w = LocalityWeights::uniform(&g);
        let r = node_wise_sample(&g, &batch(&[0, 4]), &cfg, &w, &mut RngStream::new(3, 0)).unwrap();
        let blocks = r.blocks().unwrap();
        for (h, block) in blocks.iter().enumerate() {
            for (i, &v) in r.layers[h].iter().enumerate() {
                let picked: Vec<NodeId> = block.row(i).iter().map(|&j| r.layers[h + 1][j as usize]).collect();
                assert_eq!(picked, g.neighbors(v));
            }
        }
        // trace holds every row scan
        let expected: usize = r.layers[..2].iter().flatten().map(|&v| g.degree(v)).sum();
        assert_eq!(r.access_trace.len(), expected);
    }

    #[test]
    fn isolated_frontier_is_recorded() {
        let g = Graph::from_edges(3, &[(0, 1)], false).unwrap();
        let cfg = SamplerConfig::node_wise(2, vec![2], 0);
        let r = node_wise_sample(&g, &batch(&[2, 0]), &cfg, &LocalityWeights::uniform(&g), &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(r.blocks().unwrap()[0].row(0).len(), 0);
        assert_eq!(r.warnings.len(), 1);
        assert_eq!(r.layers[1], vec![0, 1, 2]);
    }

    #[test]
    fn wrong_category_is_rejected() {
        let g = star();
        let cfg = SamplerConfig::subgraph(1, 2, 0);
        assert!(node_wise_sample(&g, &batch(&[0]), &cfg, &LocalityWeights::uniform(&g), &mut RngStream::new(0, 0)).is_err());
    }
}
