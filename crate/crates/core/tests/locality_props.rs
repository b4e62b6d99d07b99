use gsampler::graph::{generate_clustered, shuffle_ids, NodeId};
use gsampler::locality::{construct_locality, good_neighbor_generation, mean_similarity, similarity, LocalityParams};
use proptest::prelude::*;

fn sorted_run(max_len: usize) -> impl Strategy<Value = Vec<NodeId>> {
    prop::collection::btree_set(0u32..100_000, 1..=max_len).prop_map(|s| s.into_iter().collect())
}

fn sim(real: &[NodeId]) -> f64 {
    similarity(real, &good_neighbor_generation(real).unwrap()).unwrap()
}

proptest! {
    #[test]
    fn similarity_at_most_one(real in sorted_run(64)) {
        let s = sim(&real);
        prop_assert!(s <= 1.0);
        let contiguous = real.windows(2).all(|w| w[1] == w[0] + 1);
        prop_assert_eq!(s == 1.0, contiguous);
    }

    #[test]
    fn contiguous_runs_score_one(start in 0u32..1_000_000, len in 1usize..64) {
        let real: Vec<NodeId> = (start..start + len as u32).collect();
        prop_assert_eq!(sim(&real), 1.0);
    }

    // Stretching the last neighbor away never helps.
    #[test]
    fn spreading_the_tail_never_increases(real in sorted_run(32), delta in 1u32..10_000) {
        prop_assume!(real.len() >= 2);
        let mut worse = real.clone();
        *worse.last_mut().unwrap() += delta;
        prop_assert!(sim(&worse) <= sim(&real));
    }
}

#[test]
fn interior_spread_can_raise_similarity() {
    // moving an interior neighbor up can increase the ratio, so the
    // monotonicity property only holds for the last position
    let before = [16, 60, 124, 136, 175, 196];
    let after = [16, 66, 124, 136, 175, 196];
    assert!(sim(&after) > sim(&before));
}

#[test]
fn worked_example() {
    assert!((sim(&[5, 9, 13]) - 170.0 / 275.0).abs() < 1e-12);
}

#[test]
fn contiguous_clusters_are_fully_eligible() {
    for p_intra in [0.3, 1.0] {
        let g = generate_clustered(4, 20, p_intra, 0.0, 3).unwrap().graph;
        for s in [0.0, 0.5, 1.0] {
            let w = construct_locality(&g, &LocalityParams::new(2, s)).unwrap();
            let mut checked = 0;
            for v in 0..g.num_nodes() as NodeId {
                let row = g.neighbors(v);
                if row.len() >= 2 && row.windows(2).all(|w| w[1] == w[0] + 1) {
                    assert_eq!(w.weight(v), 1.0);
                    checked += 1;
                }
            }
            // with full clusters the first and last node of each are contiguous
            assert!(p_intra < 1.0 || checked == 8);
        }
    }
}

#[test]
fn shuffling_lowers_mean_similarity() {
    for seed in 0..3 {
        let g = generate_clustered(8, 64, 0.2, 0.005, seed).unwrap().graph;
        assert!(mean_similarity(&shuffle_ids(&g, seed + 1)) < mean_similarity(&g));
    }
}

#[test]
fn construction_is_idempotent() {
    let g = shuffle_ids(&generate_clustered(4, 64, 0.2, 0.01, 9).unwrap().graph, 1);
    let p = LocalityParams::new(2, 0.3);
    assert_eq!(construct_locality(&g, &p).unwrap(), construct_locality(&g, &p).unwrap());
}
