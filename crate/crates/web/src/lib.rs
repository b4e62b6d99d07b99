//! Browser demo. Every export takes plain numbers or text and returns a
//! JSON string; failures come back as `{"error": "..."}`.

use gsampler::analysis::{compare_runs, CacheConfig};
use gsampler::graph::{generate_clustered, ClusteredGraph};
use gsampler::locality::{construct_locality, good_neighbor_generation, mean_similarity, similarities, similarity};
use gsampler::rng::derive_seed;
use gsampler::samplers::Sampler;
use gsampler::{LocalityParams, NodeId, SamplerConfig};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest graph the page will build.
pub const MAX_NODES: usize = 8192;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphSpec {
    pub clusters: usize,
    pub nodes_per_cluster: usize,
    pub p_intra: f64,
    pub p_inter: f64,
    pub shuffle: bool,
    pub seed: u64,
}

impl GraphSpec {
    pub fn build(&self) -> Result<ClusteredGraph, String> {
        if self.clusters.saturating_mul(self.nodes_per_cluster) > MAX_NODES {
            return Err(format!("at most {MAX_NODES} nodes"));
        }
        let cg = generate_clustered(
            self.clusters,
            self.nodes_per_cluster,
            self.p_intra,
            self.p_inter,
            derive_seed(self.seed, "graph"),
        )
        .map_err(|e| e.to_string())?;
        Ok(if self.shuffle {
            cg.shuffled(derive_seed(self.seed, "shuffle"))
        } else {
            cg
        })
    }
}

/// Parses ids separated by commas or whitespace.
pub fn parse_ids(text: &str) -> Result<Vec<NodeId>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<NodeId>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

/// Similarity of a neighbor list against its contiguous run, with the
/// per-position products.
pub fn similarity_report(text: &str) -> Result<Value, String> {
    let mut real = parse_ids(text)?;
    real.sort_unstable();
    real.dedup();
    let good = good_neighbor_generation(&real).map_err(|e| e.to_string())?;
    let sim = similarity(&real, &good).map_err(|e| e.to_string())?;
    let dot: u128 = real.iter().zip(&good).map(|(&r, &g)| u128::from(r) * u128::from(g)).sum();
    let norm: u128 = real.iter().map(|&r| u128::from(r) * u128::from(r)).sum();
    Ok(json!({
        "real": real,
        "good": good,
        "similarity": sim,
        "dot": dot.to_string(),
        "norm": norm.to_string(),
        "gaps": real.iter().zip(&good).map(|(r, g)| r - g).collect::<Vec<_>>(),
    }))
}

/// Eligible fraction at `steps + 1` evenly spaced thresholds in `[0, 1]`,
/// plus a similarity histogram.
pub fn eligibility_curve(spec: &GraphSpec, n: usize, steps: usize) -> Result<Value, String> {
    let steps = steps.clamp(1, 200);
    let g = spec.build()?.graph;
    let sims: Vec<f64> = similarities(&g)
        .into_iter()
        .enumerate()
        .filter_map(|(v, s)| s.filter(|_| g.degree(v as NodeId) >= n))
        .collect();
    let mut points = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let s = i as f64 / steps as f64;
        let w = construct_locality(&g, &LocalityParams::new(n, s)).map_err(|e| e.to_string())?;
        points.push(json!({ "s": s, "eligible": w.eligible_fraction() }));
    }
    let mut histogram = vec![0usize; 20];
    for s in &sims {
        histogram[((s * 20.0) as usize).min(19)] += 1;
    }
    Ok(json!({
        "nodes": g.num_nodes(),
        "edges": g.num_edges(),
        "mean_similarity": mean_similarity(&g),
        "curve": points,
        "histogram": histogram,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompareSpec {
    pub n: usize,
    pub s: f64,
    pub budget: usize,
    pub batches: usize,
    pub l2_lines: usize,
    pub l3_lines: usize,
}

/// Vanilla and locality subgraph sampling over the same batches, replayed
/// through the cache and measured for topology.
pub fn compare_arms(spec: &GraphSpec, c: &CompareSpec) -> Result<Value, String> {
    let g = spec.build()?.graph;
    let err = |e: gsampler::Error| e.to_string();
    let batches = c.batches.clamp(1, 500);
    // subgraph pools ignore batch contents, so one node per batch suffices
    let train: Vec<NodeId> = (0..batches.min(g.num_nodes()) as NodeId).collect();
    let cache = CacheConfig::new(64, c.l2_lines, c.l3_lines, 256).map_err(err)?;
    let vanilla_cfg = SamplerConfig::subgraph(1, c.budget, spec.seed);
    let ours_cfg = vanilla_cfg.clone().with_locality(LocalityParams::new(c.n, c.s));

    let vanilla = Sampler::init(&g, &train, &vanilla_cfg, None).map_err(err)?;
    let ours = Sampler::init(&g, &train, &ours_cfg, None).map_err(err)?;
    let a = vanilla.execute(0).map_err(err)?.0;
    let b = ours.execute(0).map_err(err)?.0;
    let report = compare_runs(&a, &b, &cache).map_err(err)?;

    let series = |arm: &gsampler::analysis::ArmSummary| {
        json!({
            "l3_dram": arm.batches.iter().map(|m| m.cache.l3_to_dram).collect::<Vec<_>>(),
            "cc": arm.batches.iter().map(|m| m.topology.map_or(0.0, |t| t.avg_clustering_coefficient)).collect::<Vec<_>>(),
        })
    };
    let mut out = report.summary_json();
    out["eligible_fraction"] = json!(ours.init_report().eligible_fraction);
    out["fallback_count"] = json!(b.iter().map(|r| r.fallback_count).sum::<usize>());
    out["series"] = json!({ "vanilla": series(&report.vanilla), "ours": series(&report.ours) });
    Ok(out)
}

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn similarity_explorer(neighbors: &str) -> String {
    respond(similarity_report(neighbors))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn eligibility_vs_s(
    clusters: usize,
    nodes_per_cluster: usize,
    p_intra: f64,
    p_inter: f64,
    shuffle: bool,
    seed: u32,
    n: usize,
    steps: usize,
) -> String {
    let spec = GraphSpec {
        clusters,
        nodes_per_cluster,
        p_intra,
        p_inter,
        shuffle,
        seed: u64::from(seed),
    };
    respond(eligibility_curve(&spec, n, steps))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn vanilla_vs_locality(
    clusters: usize,
    nodes_per_cluster: usize,
    p_intra: f64,
    p_inter: f64,
    shuffle: bool,
    seed: u32,
    n: usize,
    s: f64,
    budget: usize,
    batches: usize,
    l2_lines: usize,
    l3_lines: usize,
) -> String {
    let spec = GraphSpec {
        clusters,
        nodes_per_cluster,
        p_intra,
        p_inter,
        shuffle,
        seed: u64::from(seed),
    };
    let c = CompareSpec {
        n,
        s,
        budget,
        batches,
        l2_lines,
        l3_lines,
    };
    respond(compare_arms(&spec, &c))
}
