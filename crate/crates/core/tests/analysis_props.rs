mod common;

use common::{brute_triangles, graph};
use gsampler::analysis::{closed_triads, clustering_coefficient, simulate_cache, CacheConfig};
use gsampler::graph::shuffle_ids;
use proptest::prelude::*;

fn trace() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..2_000, 0..600)
}

proptest! {
    #[test]
    fn miss_counts_are_ordered(t in trace(), l2 in 1usize..16, extra in 0usize..32) {
        let cfg = CacheConfig::new(64, l2, l2 + extra, 64).unwrap();
        let s = simulate_cache(&t, &cfg);
        prop_assert_eq!(s.accesses as usize, t.len());
        prop_assert!(s.l3_to_dram <= s.l2_to_l3 && s.l2_to_l3 <= s.accesses);
    }

    #[test]
    fn bigger_caches_never_miss_more(t in trace(), l2 in 1usize..16, l3x in 1usize..4, entry in prop::sample::select(vec![8u64, 64, 256])) {
        let base = CacheConfig::new(64, l2, l2 * l3x, entry).unwrap();
        let s = simulate_cache(&t, &base);
        let big_l3 = simulate_cache(&t, &CacheConfig::new(64, l2, 2 * l2 * l3x, entry).unwrap());
        prop_assert!(big_l3.l3_to_dram <= s.l3_to_dram);
        prop_assert_eq!(big_l3.l2_to_l3, s.l2_to_l3);
        let big_l2 = simulate_cache(&t, &CacheConfig::new(64, 2 * l2, 2 * l2 * l3x, entry).unwrap());
        prop_assert!(big_l2.l2_to_l3 <= s.l2_to_l3);
    }

    #[test]
    fn topology_matches_enumeration(g in graph(64)) {
        let (triads, cc) = brute_triangles(&g);
        prop_assert_eq!(closed_triads(&g), triads);
        prop_assert!((clustering_coefficient(&g) - cc).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&cc));
    }

    #[test]
    fn triads_survive_relabeling(g in graph(64), seed in any::<u64>()) {
        prop_assert_eq!(closed_triads(&shuffle_ids(&g, seed)), closed_triads(&g));
    }
}
