use serde::{Deserialize, Serialize};

use super::{simulate_stream, topology, CacheConfig, CacheStats, TopologyReport};
use crate::error::{Error, Result};
use crate::report::{csv, fmt_opt, fmt_real};
use crate::samplers::SampleResult;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Cache and topology measurements of one sampled batch. Topology is only
/// measured for subgraph results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchMetrics {
    pub batch: usize,
    pub cache: CacheStats,
    pub topology: Option<TopologyReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmSummary {
    pub batches: Vec<BatchMetrics>,
    pub mean_accesses: f64,
    pub mean_l2_l3: f64,
    pub mean_l3_dram: f64,
    pub mean_cc: Option<f64>,
    pub mean_nct: Option<f64>,
}

impl ArmSummary {
    pub fn to_csv(&self) -> String {
        csv(
            &["batch", "accesses", "l2_l3", "l3_dram", "cc", "nct"],
            self.batches.iter().map(|b| {
                vec![
                    b.batch.to_string(),
                    b.cache.accesses.to_string(),
                    b.cache.l2_to_l3.to_string(),
                    b.cache.l3_to_dram.to_string(),
                    fmt_opt(b.topology.map(|t| t.avg_clustering_coefficient)),
                    b.topology.map(|t| t.closed_triads.to_string()).unwrap_or_default(),
                ]
            }),
        )
    }
}

/// Ours over vanilla; `None` where the vanilla value is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub cc: Option<f64>,
    pub nct: Option<f64>,
    pub l3_dram: Option<f64>,
    pub l2_l3: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub vanilla: ArmSummary,
    pub ours: ArmSummary,
    pub ratios: Ratios,
    pub warnings: Vec<String>,
}

impl ComparisonReport {
    pub fn summary_json(&self) -> serde_json::Value {
        let arm = |a: &ArmSummary| {
            serde_json::json!({
                "batches": a.batches.len(),
                "mean_accesses": a.mean_accesses,
                "mean_l2_l3": a.mean_l2_l3,
                "mean_l3_dram": a.mean_l3_dram,
                "mean_cc": a.mean_cc,
                "mean_nct": a.mean_nct,
            })
        };
        serde_json::json!({
            "vanilla": arm(&self.vanilla),
            "ours": arm(&self.ours),
            "cc_ratio": self.ratios.cc,
            "nct_ratio": self.ratios.nct,
            "l3_dram_ratio": self.ratios.l3_dram,
            "l2_l3_ratio": self.ratios.l2_l3,
            "warnings": self.warnings,
        })
    }

    pub fn ratios_csv(&self) -> String {
        let r = &self.ratios;
        csv(
            &["metric", "vanilla", "ours", "ratio"],
            [
                ("l2_l3", self.vanilla.mean_l2_l3, self.ours.mean_l2_l3, r.l2_l3),
                ("l3_dram", self.vanilla.mean_l3_dram, self.ours.mean_l3_dram, r.l3_dram),
            ]
            .into_iter()
            .map(|(m, a, b, q)| (m, Some(a), Some(b), q))
            .chain([
                ("cc", self.vanilla.mean_cc, self.ours.mean_cc, r.cc),
                ("nct", self.vanilla.mean_nct, self.ours.mean_nct, r.nct),
            ])
            .map(|(m, a, b, q)| vec![m.to_string(), fmt_opt(a), fmt_opt(b), fmt_opt(q)]),
        )
    }
}

fn mean(xs: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = xs.len();
    if n == 0 {
        return 0.0;
    }
    xs.sum::<f64>() / n as f64
}

/// Replays the results' traces in batch order through one cache that stays
/// warm between batches, and measures the topology of subgraph results.
/// Means are over batches; topology means are `None` when no result is a
/// subgraph.
pub fn arm_metrics(results: &[SampleResult], config: &CacheConfig) -> ArmSummary {
    let cache = simulate_stream(results.iter().map(|r| r.access_trace.as_slice()), config);
    let topo_of = |r: &SampleResult| r.subgraph().map(topology);
    #[cfg(feature = "parallel")]
    let topos: Vec<Option<TopologyReport>> = results.par_iter().map(topo_of).collect();
    #[cfg(not(feature = "parallel"))]
    let topos: Vec<Option<TopologyReport>> = results.iter().map(topo_of).collect();
    let batches: Vec<BatchMetrics> = results
        .iter()
        .zip(cache)
        .zip(topos)
        .map(|((r, cache), topology)| BatchMetrics {
            batch: r.batch_index,
            cache,
            topology,
        })
        .collect();

    let topo: Vec<TopologyReport> = batches.iter().filter_map(|b| b.topology).collect();
    let (mean_cc, mean_nct) = if topo.is_empty() {
        (None, None)
    } else {
        (
            Some(mean(topo.iter().map(|t| t.avg_clustering_coefficient))),
            Some(mean(topo.iter().map(|t| t.closed_triads as f64))),
        )
    };
    ArmSummary {
        mean_accesses: mean(batches.iter().map(|b| b.cache.accesses as f64)),
        mean_l2_l3: mean(batches.iter().map(|b| b.cache.l2_to_l3 as f64)),
        mean_l3_dram: mean(batches.iter().map(|b| b.cache.l3_to_dram as f64)),
        mean_cc,
        mean_nct,
        batches,
    }
}

fn ratio(ours: Option<f64>, vanilla: Option<f64>) -> Option<f64> {
    match (ours, vanilla) {
        (Some(o), Some(v)) if v != 0.0 => Some(o / v),
        _ => None,
    }
}

/// Compares a vanilla stream with a locality stream batch by batch. Streams
/// of different lengths are cut to the common prefix with a warning.
pub fn compare_runs(vanilla: &[SampleResult], ours: &[SampleResult], config: &CacheConfig) -> Result<ComparisonReport> {
    if vanilla.is_empty() || ours.is_empty() {
        return Err(Error::invalid("both result streams must be non-empty"));
    }
    let mut warnings = Vec::new();
    let n = vanilla.len().min(ours.len());
    if vanilla.len() != ours.len() {
        warnings.push(format!(
            "stream lengths differ ({} vs {}); comparing the first {n} batches",
            vanilla.len(),
            ours.len()
        ));
    }
    let v = arm_metrics(&vanilla[..n], config);
    let o = arm_metrics(&ours[..n], config);
    let ratios = Ratios {
        cc: ratio(o.mean_cc, v.mean_cc),
        nct: ratio(o.mean_nct, v.mean_nct),
        l3_dram: ratio(Some(o.mean_l3_dram), Some(v.mean_l3_dram)),
        l2_l3: ratio(Some(o.mean_l2_l3), Some(v.mean_l2_l3)),
    };
    if ratios.cc.is_none() && v.mean_cc.is_some() {
        warnings.push("vanilla clustering coefficient is 0; cc ratio undefined".into());
    }
    Ok(ComparisonReport {
        vanilla: v,
        ours: o,
        ratios,
        warnings,
    })
}

/// Formats a ratio for display, `undefined` when absent.
pub fn describe_ratio(r: Option<f64>) -> String {
    r.map(fmt_real).unwrap_or_else(|| "undefined".into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, IdMap, NodeSet};
    use crate::samplers::{Adjacency, Category};

    fn result(g: Graph, trace: Vec<u64>, batch_index: usize) -> SampleResult {
        let ids = NodeSet::all(g.num_nodes());
        SampleResult {
            category: Category::Subgraph,
            batch_index,
            layers: vec![ids.ids().to_vec()],
            id_map: IdMap::new(&ids),
            adjacency: Adjacency::Subgraph(g),
            access_trace: trace,
            fallback_count: 0,
            warnings: Vec::new(),
        }
    }

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)], false).unwrap()
    }

    #[test]
    fn identical_streams() {
        let s = vec![result(triangle(), vec![0, 1, 2, 0], 0), result(triangle(), vec![5, 5], 1)];
        let r = compare_runs(&s, &s, &CacheConfig::default()).unwrap();
        assert_eq!(r.ratios.cc, Some(1.0));
        assert_eq!(r.ratios.nct, Some(1.0));
        assert_eq!(r.ratios.l3_dram, Some(1.0));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn fewer_misses_lowers_ratio() {
        let cfg = CacheConfig::new(64, 1, 1, 64).unwrap();
        let v = vec![result(triangle(), vec![0, 1, 2, 3], 0)];
        let o = vec![result(triangle(), vec![0, 0, 0, 1], 0)];
        let r = compare_runs(&v, &o, &cfg).unwrap();
        assert_eq!(r.ratios.l3_dram, Some(0.5));
    }

    #[test]
    fn zero_vanilla_cc_is_undefined() {
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)], false).unwrap();
        let r = compare_runs(&[result(path, vec![0], 0)], &[result(triangle(), vec![0], 0)], &CacheConfig::default())
            .unwrap();
        assert_eq!(r.ours.mean_cc, Some(1.0));
        assert_eq!(r.vanilla.mean_cc, Some(0.0));
        assert_eq!(r.ratios.cc, None);
        assert!(r.summary_json()["cc_ratio"].is_null());
        assert_eq!(describe_ratio(r.ratios.cc), "undefined");
    }

    #[test]
    fn mismatched_lengths_use_prefix() {
        let a = vec![result(triangle(), vec![0], 0), result(triangle(), vec![1], 1)];
        let b = vec![result(triangle(), vec![0], 0)];
        let r = compare_runs(&a, &b, &CacheConfig::default()).unwrap();
        assert_eq!(r.vanilla.batches.len(), 1);
        assert_eq!(r.warnings.len(), 1);
        assert!(compare_runs(&[], &b, &CacheConfig::default()).is_err());
    }

    #[test]
    fn csv_schema() {
        let a = arm_metrics(&[result(triangle(), vec![0, 0], 0)], &CacheConfig::default());
        assert_eq!(a.to_csv(), "batch,accesses,l2_l3,l3_dram,cc,nct\n0,2,1,1,1,1\n");
    }
}
