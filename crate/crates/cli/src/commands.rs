use std::sync::Mutex;

use rayon::prelude::*;
use serde_json::{json, Value};

use gsampler::analysis::{arm_metrics, compare_runs, ArmSummary};
use gsampler::graph::{random_permutation, save_csr, stats};
use gsampler::locality::{construct_locality, mean_similarity};
use gsampler::report::{csv, fmt_opt, fmt_real};
use gsampler::rng::derive_seed;
use gsampler::samplers::Sampler;
use gsampler::trainer::{train, write_dataset, write_splits, TrainOptions, TrainReport};
use gsampler::{LocalityParams, SamplerConfig};

use crate::config::{ExperimentConfig, GraphSource};
use crate::error::{usage, CliResult};
use crate::output::OutDir;
use crate::workspace::{generate, load_graph, permute_dataset, permute_splits, Workspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arm {
    Vanilla,
    Locality,
}

impl Arm {
    pub fn name(self) -> &'static str {
        match self {
            Arm::Vanilla => "vanilla",
            Arm::Locality => "locality",
        }
    }
}

/// Both arms unless exactly one was asked for.
pub fn arms(vanilla: bool, locality: bool) -> Vec<Arm> {
    match (vanilla, locality) {
        (true, false) => vec![Arm::Vanilla],
        (false, true) => vec![Arm::Locality],
        _ => vec![Arm::Vanilla, Arm::Locality],
    }
}

fn sampler_config(cfg: &ExperimentConfig, params: Option<LocalityParams>) -> CliResult<Option<SamplerConfig>> {
    let s = &cfg.sampler;
    let Some(category) = s.category else {
        return match params {
            Some(_) => Err(usage("the locality arm needs a sampler category, not full")),
            None => Ok(None),
        };
    };
    let c = SamplerConfig {
        category,
        batch_size: s.batch_size,
        fanouts: s.fanouts.clone(),
        layer_sizes: s.layer_sizes.clone(),
        subgraph_budget: s.budget,
        seed: cfg.seed,
        locality: params,
    };
    c.validate()?;
    Ok(Some(c))
}

fn arm_config(cfg: &ExperimentConfig, arm: Arm) -> CliResult<Option<SamplerConfig>> {
    sampler_config(cfg, (arm == Arm::Locality).then_some(cfg.locality))
}

pub fn stats_row(cfg: &ExperimentConfig) -> CliResult<String> {
    let s = stats(&load_graph(cfg)?);
    Ok(csv(
        &["nodes", "edges", "ann", "mnn", "nrr"],
        [vec![
            s.num_nodes.to_string(),
            s.num_edges.to_string(),
            s.ann.to_string(),
            s.mnn.to_string(),
            format!("{:.4}", s.nrr),
        ]],
    ))
}

pub fn cmd_stats(cfg: &ExperimentConfig, out: &OutDir) -> CliResult<String> {
    let table = stats_row(cfg)?;
    out.data("stats.csv", table.as_bytes())?;
    Ok(table)
}

pub fn cmd_generate(cfg: &ExperimentConfig, out: &OutDir) -> CliResult<Value> {
    let GraphSource::Clustered(spec) = &cfg.graph else {
        return Err(usage("generate needs the clustered generator, not graph.path"));
    };
    let cg = generate(spec, cfg.seed)?;
    let ws = Workspace::load(cfg)?;
    save_csr(&cg.graph, out.path("graph.gsmp"))?;
    let edges: String = cg.graph.edges().iter().map(|(u, v)| format!("{u} {v}\n")).collect();
    out.data("graph.edges", edges.as_bytes())?;
    if let (Some(d), Some(s)) = (&ws.dataset, &ws.splits) {
        out.data("dataset.txt", write_dataset(d).as_bytes())?;
        out.data("splits.txt", write_splits(s).as_bytes())?;
    }
    Ok(json!({
        "nodes": cg.graph.num_nodes(),
        "edges": cg.graph.num_edges(),
        "clusters": cg.num_clusters,
        "fingerprint": format!("{:016x}", cg.graph.fingerprint()),
    }))
}

pub fn cmd_shuffle(cfg: &ExperimentConfig, out: &OutDir) -> CliResult<Value> {
    let ws = Workspace::load(cfg)?;
    let perm = random_permutation(ws.graph.num_nodes(), derive_seed(cfg.seed, "shuffle"));
    let g = ws.graph.relabel(&perm)?;
    save_csr(&g, out.path("graph.gsmp"))?;
    let lines: String = perm.iter().map(|p| format!("{p}\n")).collect();
    out.data("perm.txt", lines.as_bytes())?;
    if let Some(d) = &ws.dataset {
        out.data("dataset.txt", write_dataset(&permute_dataset(d, &perm)?).as_bytes())?;
    }
    if let Some(s) = &ws.splits {
        out.data("splits.txt", write_splits(&permute_splits(s, &perm)).as_bytes())?;
    }
    Ok(json!({
        "nodes": g.num_nodes(),
        "edges": g.num_edges(),
        "mean_similarity_before": mean_similarity(&ws.graph),
        "mean_similarity_after": mean_similarity(&g),
    }))
}

pub fn cmd_locality(cfg: &ExperimentConfig, out: &OutDir) -> CliResult<Value> {
    let g = load_graph(cfg)?;
    let w = construct_locality(&g, &cfg.locality)?;
    let path = cfg.weights_path();
    if let Some(dir) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| crate::error::CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    gsampler::locality::save_weights(&w, &path)?;
    let summary = json!({
        "nodes": g.num_nodes(),
        "min_neighbors": cfg.locality.min_neighbors,
        "similarity_threshold": cfg.locality.similarity_threshold,
        "eligible_count": w.eligible_count(),
        "eligible_fraction": w.eligible_fraction(),
        "mean_similarity": mean_similarity(&g),
        "fingerprint": format!("{:016x}", w.graph_fingerprint),
    });
    out.data_json("locality.json", &summary)?;
    Ok(summary)
}

fn arm_json(a: &ArmSummary, fallback_count: usize, eligible_fraction: Option<f64>) -> Value {
    json!({
        "batches": a.batches.len(),
        "mean_accesses": a.mean_accesses,
        "mean_l2_l3": a.mean_l2_l3,
        "mean_l3_dram": a.mean_l3_dram,
        "mean_cc": a.mean_cc,
        "mean_nct": a.mean_nct,
        "fallback_count": fallback_count,
        "eligible_fraction": eligible_fraction,
    })
}

pub fn cmd_bench(cfg: &ExperimentConfig, out: &OutDir, arms: &[Arm]) -> CliResult<Value> {
    let ws = Workspace::load(cfg)?;
    let train_nodes = ws.train_nodes();
    let mut streams = Vec::new();
    let mut summary = serde_json::Map::new();
    let mut timing = serde_json::Map::new();
    for &arm in arms {
        let conf = arm_config(cfg, arm)?.ok_or_else(|| usage("bench needs a sampler category, not full"))?;
        let cache = (arm == Arm::Locality).then(|| cfg.weights_path());
        let sampler = Sampler::init(&ws.graph, &train_nodes, &conf, cache.as_deref())?;
        let (results, seconds) = sampler.execute(0)?;
        let metrics = arm_metrics(&results, &cfg.cache);
        let fallbacks: usize = results.iter().map(|r| r.fallback_count).sum();
        let init = sampler.init_report();

        out.data(&format!("bench_{}.csv", arm.name()), metrics.to_csv().as_bytes())?;
        let rows = seconds.iter().enumerate().map(|(i, s)| vec![i.to_string(), fmt_real(*s)]);
        out.timing(
            &format!("bench_{}.csv", arm.name()),
            csv(&["batch", "execute_seconds"], rows).as_bytes(),
        )?;
        summary.insert(arm.name().into(), arm_json(&metrics, fallbacks, init.eligible_fraction));
        timing.insert(
            arm.name().into(),
            json!({
                "init_seconds": init.init_seconds,
                "weights_from_cache": init.weights_from_cache,
                "execute_seconds": seconds.iter().sum::<f64>(),
            }),
        );
        streams.push(results);
    }
    summary.insert("category".into(), json!(cfg.sampler.category.map(|c| c.as_str())));
    if let [vanilla, ours] = streams.as_slice() {
        let report = compare_runs(vanilla, ours, &cfg.cache)?;
        let r = &report.ratios;
        summary.insert("l3_dram_ratio".into(), json!(r.l3_dram));
        summary.insert("l2_l3_ratio".into(), json!(r.l2_l3));
        summary.insert("cc_ratio".into(), json!(r.cc));
        summary.insert("nct_ratio".into(), json!(r.nct));
        summary.insert("warnings".into(), json!(report.warnings));
        out.data("bench_ratios.csv", report.ratios_csv().as_bytes())?;
        let t = |a: &str| timing[a]["execute_seconds"].as_f64().unwrap_or(0.0);
        let (tv, tl) = (t("vanilla"), t("locality"));
        timing.insert(
            "execute_time_reduction".into(),
            json!(if tv > 0.0 { Some(1.0 - tl / tv) } else { None }),
        );
    }
    let summary = Value::Object(summary);
    out.data_json("summary.json", &summary)?;
    out.timing_json("bench.json", &Value::Object(timing))?;
    Ok(summary)
}

fn train_options(cfg: &ExperimentConfig, weights_cache: Option<std::path::PathBuf>) -> TrainOptions {
    TrainOptions {
        epochs: cfg.train.epochs,
        lr: cfg.train.lr,
        hidden: cfg.train.hidden,
        seed: cfg.seed,
        weights_cache,
    }
}

fn report_json(arm: &str, category: Option<&str>, r: &TrainReport) -> Value {
    json!({
        "arm": arm,
        "category": category,
        "epochs": r.epochs.len(),
        "final_loss": r.final_loss(),
        "final_val_accuracy": r.final_val_accuracy(),
        "test_accuracy": r.test_accuracy,
        "eligible_fraction": r.eligible_fraction,
        "fallback_count": r.fallback_count(),
        "skipped_batches": r.skipped_batches,
    })
}

pub fn cmd_train(cfg: &ExperimentConfig, out: &OutDir, arms: &[Arm]) -> CliResult<Value> {
    let ws = Workspace::load(cfg)?;
    let (data, splits) = ws.require_training_data()?;
    let category = cfg.sampler.category.map(|c| c.as_str());
    let mut reports = Vec::new();
    for &arm in arms {
        let conf = arm_config(cfg, arm)?;
        let cache = (arm == Arm::Locality).then(|| cfg.weights_path());
        let report = train(&ws.graph, data, splits, conf.as_ref(), &train_options(cfg, cache))?;
        let name = arm.name();
        out.data_json(&format!("train_{name}.json"), &report_json(name, category, &report))?;
        out.data(&format!("train_{name}_epochs.csv"), report.epochs_csv().as_bytes())?;
        out.timing(&format!("train_{name}_epochs.csv"), report.timing_csv().as_bytes())?;
        out.timing_json(
            &format!("train_{name}.json"),
            &json!({
                "init_seconds": report.init_seconds,
                "train_seconds": report.train_seconds(),
                "total_seconds": report.total_seconds,
            }),
        )?;
        reports.push((name, report));
    }

    let mut summary = json!({
        "arms": reports.iter().map(|(n, r)| (n.to_string(), report_json(n, category, r))).collect::<serde_json::Map<_, _>>(),
    });
    if let [(_, v), (_, l)] = reports.as_slice() {
        summary["accuracy_delta"] = json!(v.final_val_accuracy() - l.final_val_accuracy());
        summary["test_accuracy_delta"] = json!(v.test_accuracy - l.test_accuracy);
        out.data_json("train_summary.json", &summary)?;
        let (tv, tl) = (v.train_seconds(), l.train_seconds());
        out.timing_json(
            "train_summary.json",
            &json!({
                "vanilla_train_seconds": tv,
                "locality_train_seconds": tl,
                "time_reduction": if tv > 0.0 { Some(1.0 - tl / tv) } else { None },
            }),
        )?;
    }
    Ok(summary)
}

struct SweepRow {
    n: usize,
    s: f64,
    eligible_fraction: Option<f64>,
    val_accuracy: f64,
    fallback_count: usize,
    train_seconds: f64,
}

fn sweep_tables(rows: &[Option<SweepRow>]) -> (String, String) {
    let done = || rows.iter().flatten();
    let data = csv(
        &["n", "s", "eligible_fraction", "val_accuracy", "fallback_count"],
        done().map(|r| {
            vec![
                r.n.to_string(),
                fmt_real(r.s),
                fmt_opt(r.eligible_fraction),
                fmt_real(r.val_accuracy),
                r.fallback_count.to_string(),
            ]
        }),
    );
    let timing = csv(
        &["n", "s", "train_seconds", "val_accuracy", "fallback_count"],
        done().map(|r| {
            vec![
                r.n.to_string(),
                fmt_real(r.s),
                fmt_real(r.train_seconds),
                fmt_real(r.val_accuracy),
                r.fallback_count.to_string(),
            ]
        }),
    );
    (data, timing)
}

/// Trains the locality arm once per `(n, s)` cell. Cells run concurrently;
/// after each one finishes, both tables are rewritten with every finished
/// row in grid order.
pub fn cmd_sweep(cfg: &ExperimentConfig, out: &OutDir, ns: &[usize], ss: &[f64]) -> CliResult<Value> {
    let ws = Workspace::load(cfg)?;
    let (data, splits) = ws.require_training_data()?;
    let cells: Vec<(usize, f64)> = ns.iter().flat_map(|&n| ss.iter().map(move |&s| (n, s))).collect();
    let rows: Mutex<Vec<Option<SweepRow>>> = Mutex::new(cells.iter().map(|_| None).collect());

    cells.par_iter().enumerate().try_for_each(|(i, &(n, s))| -> CliResult<()> {
        let params = LocalityParams::new(n, s).with_parent_reuse(cfg.locality.parent_reuse_ratio);
        params.validate()?;
        let conf = sampler_config(cfg, Some(params))?;
        let report = train(&ws.graph, data, splits, conf.as_ref(), &train_options(cfg, None))?;
        let row = SweepRow {
            n,
            s,
            eligible_fraction: report.eligible_fraction,
            val_accuracy: report.final_val_accuracy(),
            fallback_count: report.fallback_count(),
            train_seconds: report.train_seconds(),
        };
        let mut rows = rows.lock().expect("sweep rows");
        rows[i] = Some(row);
        let (d, tm) = sweep_tables(&rows);
        out.data("sweep.csv", d.as_bytes())?;
        out.timing("sweep.csv", tm.as_bytes())?;
        Ok(())
    })?;

    let rows = rows.into_inner().expect("sweep rows");
    Ok(json!({
        "cells": rows.iter().flatten().map(|r| json!({
            "n": r.n,
            "s": r.s,
            "eligible_fraction": r.eligible_fraction,
            "val_accuracy": r.val_accuracy,
            "fallback_count": r.fallback_count,
        })).collect::<Vec<_>>(),
    }))
}
