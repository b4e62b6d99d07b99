mod common;

use common::{brute_induce, graph};
use gsampler::graph::{generate_clustered, shuffle_ids, Graph, NodeId, NodeSet};
use gsampler::locality::{layer_weights, LocalityParams, LocalityWeights, WeightMode};
use gsampler::samplers::{
    node_wise_sample, run_sampler, subgraph_sample, weighted_choice, Batch, PreparedChoice, SamplerConfig,
};
use gsampler::RngStream;
use proptest::prelude::*;

fn binary(g: &Graph, mask: &[bool]) -> LocalityWeights {
    LocalityWeights {
        mode: WeightMode::Binary,
        weights: mask.iter().map(|&b| f64::from(u8::from(b))).collect(),
        ..LocalityWeights::uniform(g)
    }
}

fn graph_with_mask() -> impl Strategy<Value = (Graph, Vec<bool>)> {
    graph(24).prop_flat_map(|g| {
        let n = g.num_nodes();
        (Just(g), prop::collection::vec(any::<bool>(), n))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn node_wise_respects_zero_weights((g, mask) in graph_with_mask(), seed in any::<u64>(), fanout in 1usize..4) {
        let w = binary(&g, &mask);
        let cfg = SamplerConfig::node_wise(1, vec![fanout], 0);
        for v in 0..g.num_nodes() as NodeId {
            let batch = Batch { node_ids: vec![v], batch_index: 0 };
            let r = node_wise_sample(&g, &batch, &cfg, &w, &mut RngStream::new(seed, u64::from(v))).unwrap();
            let row = r.blocks().unwrap()[0].row(0);
            let picked: Vec<NodeId> = row.iter().map(|&j| r.layers[1][j as usize]).collect();
            let eligible = g.neighbors(v).iter().filter(|&&u| mask[u as usize]).count();
            prop_assert_eq!(picked.len(), fanout.min(g.degree(v)));
            let mut dedup = picked.clone();
            dedup.dedup();
            prop_assert_eq!(dedup.len(), picked.len());
            prop_assert!(picked.iter().all(|&u| g.has_edge(v, u)));
            if eligible >= fanout {
                prop_assert!(picked.iter().all(|&u| mask[u as usize]));
            }
        }
    }

    #[test]
    fn subgraph_pool_is_admissible((g, mask) in graph_with_mask(), seed in any::<u64>(), budget in 1usize..8) {
        let w = binary(&g, &mask);
        let eligible = mask.iter().filter(|&&b| b).count();
        let cfg = SamplerConfig::subgraph(1, budget, 0);
        let out = subgraph_sample(&g, &cfg, &w, &mut RngStream::new(seed, 0));
        if budget > g.num_nodes() || (eligible > 0 && eligible < budget) {
            prop_assert!(out.is_err());
        } else {
            let r = out.unwrap();
            let pool = &r.layers[0];
            prop_assert_eq!(pool.len(), budget);
            prop_assert!(pool.windows(2).all(|p| p[0] < p[1]));
            if eligible > 0 {
                prop_assert!(pool.iter().all(|&u| mask[u as usize]));
            }
            prop_assert_eq!(r.subgraph().unwrap().edges(), brute_induce(&g, pool));
        }
    }

    #[test]
    fn weighted_draws_are_admissible(mask in prop::collection::vec(any::<bool>(), 1..12), seed in any::<u64>(), k in 1usize..5) {
        let g = Graph::empty(mask.len());
        let w = binary(&g, &mask);
        let cands: Vec<NodeId> = (0..mask.len() as NodeId).collect();
        let eligible = mask.iter().filter(|&&b| b).count();
        let out = weighted_choice(&cands, &w, k, false, &mut RngStream::new(seed, 0));
        let support = if eligible == 0 { mask.len() } else { eligible };
        if k > support {
            prop_assert!(out.is_err());
        } else {
            let d = out.unwrap();
            prop_assert_eq!(d.fell_back, eligible == 0);
            let mut ids = d.ids.clone();
            ids.sort_unstable();
            ids.dedup();
            prop_assert_eq!(ids.len(), k);
            if eligible > 0 {
                prop_assert!(d.ids.iter().all(|&u| mask[u as usize]));
            }
        }
    }

    #[test]
    fn layer_probabilities_sum_to_one(g in graph(48), pick in prop::collection::vec(any::<prop::sample::Index>(), 1..20)) {
        let set = NodeSet::new(pick.iter().map(|i| i.index(g.num_nodes()) as NodeId).collect());
        let w = layer_weights(&g, &set).unwrap();
        let total: f64 = w.normalized().unwrap().iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let p: f64 = PreparedChoice::new(set.ids(), &w).unwrap().probabilities().iter().map(|x| x.1).sum();
        prop_assert!((p - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn frequencies_match_weights() {
    let g = Graph::empty(6);
    let w = LocalityWeights {
        mode: WeightMode::Proportional,
        weights: vec![1.0, 2.0, 3.0, 0.0, 4.0, 2.0],
        ..LocalityWeights::uniform(&g)
    };
    let cands: Vec<NodeId> = (0..6).collect();
    let n = 20_000;
    let mut counts = [0usize; 6];
    let mut rng = RngStream::new(42, 0);
    for _ in 0..n {
        counts[weighted_choice(&cands, &w, 1, true, &mut rng).unwrap().ids[0] as usize] += 1;
    }
    let total: f64 = w.weights.iter().sum();
    for (c, &x) in counts.iter().zip(&w.weights) {
        let expect = x / total;
        let got = *c as f64 / n as f64;
        assert!((got - expect).abs() <= 0.05 * expect.max(1e-9) || (expect == 0.0 && *c == 0), "{got} vs {expect}");
    }
}

#[cfg(feature = "parallel")]
#[test]
fn thread_count_does_not_change_samples() {
    let g = shuffle_ids(&generate_clustered(4, 64, 0.2, 0.01, 1).unwrap().graph, 2);
    let train: Vec<NodeId> = (0..128).collect();
    let cfgs = [
        SamplerConfig::node_wise(16, vec![4, 4], 5).with_locality(LocalityParams::new(2, 0.1)),
        SamplerConfig::layer_wise(16, vec![32, 32], 5).with_locality(LocalityParams::new(2, 0.1)),
        SamplerConfig::subgraph(16, 40, 5).with_locality(LocalityParams::new(2, 0.1)),
    ];
    for cfg in &cfgs {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| run_sampler(&g, &train, cfg, None).unwrap().results)
        };
        assert_eq!(run(1), run(8));
    }
}
