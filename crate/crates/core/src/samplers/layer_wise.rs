use super::choice::PreparedChoice;
use super::{union_map, Adjacency, Batch, Block, Category, SampleResult, SamplerConfig};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId, NodeSet};
use crate::locality::{augment_with_parents, candidate_degree_weights};
use crate::rng::RngStream;

/// Layer-wise sampling, top-down from the batch.
///
/// For each layer the candidates are the neighbors of the layer above. With
/// locality enabled (`config.locality`), a `parent_reuse_ratio` share of the
/// layer above joins the candidates and nodes are drawn proportionally to
/// their degree; otherwise the draw is uniform. `layer_sizes[l]` nodes are
/// drawn without replacement (all candidates when there are fewer). The
/// sampled layer is the parent set of the next one.
///
/// Block rows connect an upper node to every lower node that is its
/// neighbor or itself.
pub fn layer_wise_sample(
    g: &Graph,
    batch: &Batch,
    config: &SamplerConfig,
    rng: &mut RngStream,
) -> Result<SampleResult> {
    if config.category != Category::LayerWise || config.layer_sizes.is_empty() {
        return Err(Error::invalid("layer-wise sampling needs a layer_wise config with layer sizes"));
    }
    if batch.node_ids.is_empty() {
        return Err(Error::invalid("empty batch"));
    }
    let batch_set = NodeSet::new(batch.node_ids.clone());
    batch_set.check_within(g.num_nodes())?;

    let mut layers = vec![batch.node_ids.clone()];
    let mut parents = batch_set;
    let mut blocks = Vec::with_capacity(config.layer_sizes.len());
    let mut trace = Vec::new();
    let mut fallback_count = 0;
    let mut warnings = Vec::new();

    for (l, &size) in config.layer_sizes.iter().enumerate() {
        let mut neigh = Vec::new();
        for &v in parents.ids() {
            let row = g.neighbors(v);
            trace.extend(row.iter().map(|&u| u64::from(u)));
            neigh.extend_from_slice(row);
        }
        let mut candidates = NodeSet::new(neigh);
        if let Some(p) = &config.locality {
            candidates = augment_with_parents(&candidates, &parents, p.parent_reuse_ratio, rng)?;
        }

        let sampled: Vec<NodeId> = if candidates.is_empty() {
            warnings.push(format!("layer {}: no candidates, layer left empty", l + 1));
            Vec::new()
        } else if candidates.len() <= size {
            candidates.ids().to_vec()
        } else {
            let weights = match &config.locality {
                Some(_) => {
                    let (w, fell_back) = candidate_degree_weights(g, candidates.ids());
                    fallback_count += usize::from(fell_back);
                    w
                }
                None => vec![1.0; candidates.len()],
            };
            let mut s = PreparedChoice::from_weights(candidates.ids(), &weights)?.draw(size, false, rng)?;
            s.sort_unstable();
            s
        };

        let upper = &layers[l];
        let mut block = Block {
            offsets: Vec::with_capacity(upper.len() + 1),
            sources: Vec::new(),
        };
        block.offsets.push(0);
        for &v in upper {
            let row = g.neighbors(v);
            trace.extend(row.iter().map(|&u| u64::from(u)));
            let start = block.sources.len();
            for &u in row.iter().chain(std::iter::once(&v)) {
                if let Ok(j) = sampled.binary_search(&u) {
                    block.sources.push(j as u32);
                }
            }
            block.sources[start..].sort_unstable();
            block.offsets.push(block.sources.len());
        }
        blocks.push(block);

        parents = NodeSet::from_sorted(sampled.clone())?;
        layers.push(sampled);
    }

    let id_map = union_map(&layers);
    Ok(SampleResult {
        category: Category::LayerWise,
        batch_index: batch.batch_index,
        layers,
        adjacency: Adjacency::Layered(blocks),
        id_map,
        access_trace: trace,
        fallback_count,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::locality::LocalityParams;

    fn path() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)], false).unwrap()
    }

    fn batch(ids: &[NodeId]) -> Batch {
        Batch {
            node_ids: ids.to_vec(),
            batch_index: 0,
        }
    }

    fn cfg(sizes: Vec<usize>, rho: f64) -> SamplerConfig {
        SamplerConfig::layer_wise(1, sizes, 0)
            .with_locality(LocalityParams::new(1, 0.0).with_parent_reuse(rho))
    }

    #[test]
    fn exhaustive_layer() {
        let r = layer_wise_sample(&path(), &batch(&[1]), &cfg(vec![2], 0.0), &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(r.layers, vec![vec![1], vec![0, 2]]);
        assert_eq!(r.blocks().unwrap()[0].row(0), &[0, 1]);
    }

    #[test]
    fn degree_proportional_frequencies() {
        let c = cfg(vec![1], 0.0);
        let n = 10_000;
        let zeros = (0..n)
            .filter(|&s| {
                let r = layer_wise_sample(&path(), &batch(&[1]), &c, &mut RngStream::new(s, 0)).unwrap();
                assert_eq!(r.layers[1].len(), 1);
                r.layers[1][0] == 0
            })
            .count();
        let f = zeros as f64 / n as f64;
        assert!((f - 0.5).abs() < 0.05, "{f}");
    }

    #[test]
    fn full_parent_reuse() {
        let r = layer_wise_sample(&path(), &batch(&[1]), &cfg(vec![3], 1.0), &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(r.layers[1], vec![0, 1, 2]);
        // node 1 aggregates from 0, itself and 2
        assert_eq!(r.blocks().unwrap()[0].row(0), &[0, 1, 2]);
    }

    #[test]
    fn empty_candidates_warn() {
        let g = Graph::from_edges(3, &[(0, 1)], false).unwrap();
        let c = SamplerConfig::layer_wise(1, vec![2, 2], 0);
        let r = layer_wise_sample(&g, &batch(&[2]), &c, &mut RngStream::new(0, 0)).unwrap();
        assert!(r.layers[1].is_empty() && r.layers[2].is_empty());
        assert_eq!(r.warnings.len(), 2);
    }

    #[test]
    fn vanilla_is_uniform_without_reuse() {
        // star centre 0 with leaves 1..=4; leaf degrees are equal so compare
        // with a graph where degrees differ: 0-1, 0-2, 2-3, 2-4
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (2, 3), (2, 4)], false).unwrap();
        let c = SamplerConfig::layer_wise(1, vec![1], 0);
        let n = 10_000;
        let twos = (0..n)
            .filter(|&s| layer_wise_sample(&g, &batch(&[0]), &c, &mut RngStream::new(s, 0)).unwrap().layers[1][0] == 2)
            .count();
        // uniform over {1, 2}; degree weighting would give 3/4
        assert!((twos as f64 / n as f64 - 0.5).abs() < 0.05);
    }
}
