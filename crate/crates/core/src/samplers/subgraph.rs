use super::choice::PreparedChoice;
use super::{Adjacency, Category, SampleResult, SamplerConfig};
use crate::error::{Error, Result};
use crate::graph::{induce_subgraph_traced, Graph, NodeId, NodeSet};
use crate::locality::LocalityWeights;
use crate::rng::RngStream;

/// Node-pool subgraph sampling.
///
/// Nodes are drawn with replacement over the whole graph, weighted by
/// `weights`, into a pool until the pool holds `subgraph_budget` distinct
/// nodes. Processing sorts and deduplicates the pool, and the subgraph it
/// induces is the minibatch.
pub fn subgraph_sample(
    g: &Graph,
    config: &SamplerConfig,
    weights: &LocalityWeights,
    rng: &mut RngStream,
) -> Result<SampleResult> {
    let all: Vec<NodeId> = (0..g.num_nodes() as NodeId).collect();
    let prepared = PreparedChoice::new(&all, weights)?;
    sample_prepared(g, config, &prepared, 0, rng)
}

pub(crate) fn sample_prepared(
    g: &Graph,
    config: &SamplerConfig,
    prepared: &PreparedChoice,
    batch_index: usize,
    rng: &mut RngStream,
) -> Result<SampleResult> {
    if config.category != Category::Subgraph {
        return Err(Error::invalid("subgraph sampling needs a subgraph config"));
    }
    let budget = config.subgraph_budget;
    if budget == 0 || budget > g.num_nodes() {
        return Err(Error::invalid(format!(
            "subgraph budget {budget} must be in 1..={}",
            g.num_nodes()
        )));
    }
    let available = prepared.support_len();
    if available < budget {
        return Err(Error::BudgetUnreachable { budget, available });
    }

    let mut in_pool = vec![false; g.num_nodes()];
    let mut node_pool = Vec::with_capacity(budget);
    let mut distinct = 0;
    while distinct < budget {
        for v in prepared.draw(budget - distinct, true, rng)? {
            node_pool.push(v);
            if !std::mem::replace(&mut in_pool[v as usize], true) {
                distinct += 1;
            }
        }
    }
    // processing: sort and drop duplicates
    let pool = NodeSet::new(node_pool);

    let mut trace = Vec::new();
    let (sub, id_map) = induce_subgraph_traced(g, &pool, &mut |u| trace.push(u64::from(u)))?;
    Ok(SampleResult {
        category: Category::Subgraph,
        batch_index,
        layers: vec![pool.into_vec()],
        adjacency: Adjacency::Subgraph(sub),
        id_map,
        access_trace: trace,
        fallback_count: usize::from(prepared.fell_back()),
        warnings: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_clustered, induce_subgraph};
    use crate::locality::{LocalityParams, WeightMode};

    fn binary(w: Vec<f64>) -> LocalityWeights {
        LocalityWeights {
            mode: WeightMode::Binary,
            weights: w,
            params: LocalityParams::default(),
            graph_fingerprint: 0,
            uniform_fallback: false,
        }
    }

    #[test]
    fn full_budget_is_identity() {
        let g = generate_clustered(2, 10, 0.5, 0.1, 4).unwrap().graph;
        let cfg = SamplerConfig::subgraph(1, 20, 0);
        let r = subgraph_sample(&g, &cfg, &LocalityWeights::uniform(&g), &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(r.subgraph().unwrap(), &g);
        assert_eq!(r.access_trace.len(), g.num_entries());
    }

    #[test]
    fn only_triangle_a_is_admissible() {
        let g = generate_clustered(2, 3, 1.0, 0.0, 0).unwrap().graph;
        let w = binary(vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let cfg = SamplerConfig::subgraph(1, 3, 0);
        for s in 0..20 {
            let r = subgraph_sample(&g, &cfg, &w, &mut RngStream::new(s, 0)).unwrap();
            assert_eq!(r.layers[0], vec![0, 1, 2]);
            assert_eq!(r.subgraph().unwrap().num_edges(), 3);
            assert_eq!(r.fallback_count, 0);
        }
    }

    #[test]
    fn budget_one() {
        let g = generate_clustered(2, 3, 1.0, 0.0, 0).unwrap().graph;
        let cfg = SamplerConfig::subgraph(1, 1, 0);
        let r = subgraph_sample(&g, &cfg, &LocalityWeights::uniform(&g), &mut RngStream::new(9, 0)).unwrap();
        assert_eq!(r.layers[0].len(), 1);
        assert_eq!(r.subgraph().unwrap().num_edges(), 0);
    }

    #[test]
    fn unreachable_budget_names_shortfall() {
        let g = generate_clustered(2, 3, 1.0, 0.0, 0).unwrap().graph;
        let w = binary(vec![1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let cfg = SamplerConfig::subgraph(1, 4, 0);
        let err = subgraph_sample(&g, &cfg, &w, &mut RngStream::new(0, 0)).unwrap_err();
        assert!(matches!(err, Error::BudgetUnreachable { budget: 4, available: 2 }));
        assert!(err.to_string().contains("short by 2"));
        assert!(subgraph_sample(&g, &SamplerConfig::subgraph(1, 7, 0), &w, &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn zero_weights_fall_back() {
        let g = generate_clustered(2, 3, 1.0, 0.0, 0).unwrap().graph;
        let w = binary(vec![0.0; 6]);
        let r = subgraph_sample(&g, &SamplerConfig::subgraph(1, 4, 0), &w, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(r.fallback_count, 1);
        assert_eq!(r.layers[0].len(), 4);
    }

    #[test]
    fn matches_direct_induction() {
        let g = generate_clustered(3, 8, 0.4, 0.05, 2).unwrap().graph;
        let cfg = SamplerConfig::subgraph(1, 10, 0);
        let r = subgraph_sample(&g, &cfg, &LocalityWeights::uniform(&g), &mut RngStream::new(5, 0)).unwrap();
        let (expect, map) = induce_subgraph(&g, &NodeSet::new(r.layers[0].clone())).unwrap();
        assert_eq!(r.subgraph().unwrap(), &expect);
        assert_eq!(r.id_map, map);
    }
}
