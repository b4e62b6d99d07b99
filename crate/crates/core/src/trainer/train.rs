use std::path::PathBuf;
use web_time::Instant;

use serde::{Deserialize, Serialize};

use super::data::{Dataset, Splits};
use super::matrix::{DenseMatrix, SparseMatrix};
use super::model::{accuracy, gcn_forward, loss_and_grad, normalize_adj, ModelParams, Propagation};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::report::{csv, fmt_real};
use crate::rng::derive_seed;
use crate::samplers::{Adjacency, Block, Category, SampleResult, Sampler, SamplerConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub epochs: usize,
    pub lr: f64,
    pub hidden: usize,
    pub seed: u64,
    /// GSLW file reused across runs when locality is enabled.
    pub weights_cache: Option<PathBuf>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            epochs: 200,
            lr: 0.5,
            hidden: 16,
            seed: 0,
            weights_cache: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub sampling_seconds: f64,
    pub compute_seconds: f64,
    pub epoch_seconds: f64,
    pub loss: f64,
    pub val_accuracy: f64,
    pub fallback_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochRecord>,
    pub test_accuracy: f64,
    pub init_seconds: f64,
    pub total_seconds: f64,
    /// Share of nodes with positive locality weight, when locality is on.
    pub eligible_fraction: Option<f64>,
    /// Batches whose loss mask was empty and were skipped.
    pub skipped_batches: usize,
}

impl TrainReport {
    pub fn final_val_accuracy(&self) -> f64 {
        self.epochs.last().map_or(0.0, |e| e.val_accuracy)
    }

    pub fn final_loss(&self) -> f64 {
        self.epochs.last().map_or(f64::NAN, |e| e.loss)
    }

    pub fn fallback_count(&self) -> usize {
        self.epochs.iter().map(|e| e.fallback_count).sum()
    }

    /// Total sampling plus compute time over all epochs.
    pub fn train_seconds(&self) -> f64 {
        self.epochs.iter().map(|e| e.sampling_seconds + e.compute_seconds).sum()
    }

    /// Per-epoch values that do not depend on timing.
    pub fn epochs_csv(&self) -> String {
        csv(
            &["epoch", "loss", "val_accuracy", "fallback_count"],
            self.epochs.iter().map(|e| {
                vec![
                    e.epoch.to_string(),
                    fmt_real(e.loss),
                    fmt_real(e.val_accuracy),
                    e.fallback_count.to_string(),
                ]
            }),
        )
    }

    pub fn timing_csv(&self) -> String {
        csv(
            &["epoch", "sampling_seconds", "compute_seconds", "epoch_seconds"],
            self.epochs.iter().map(|e| {
                vec![
                    e.epoch.to_string(),
                    fmt_real(e.sampling_seconds),
                    fmt_real(e.compute_seconds),
                    fmt_real(e.epoch_seconds),
                ]
            }),
        )
    }
}

/// Sparse propagation matrix for one sampled block. Rows are the upper
/// layer and columns the lower layer.
///
/// Node-wise rows keep the exact self term and scale the sampled neighbor
/// terms by `degree / sampled`, so taking every neighbor reproduces the full
/// normalized adjacency. Layer-wise rows are scaled so each row keeps the
/// sum it has in the full normalized adjacency.
pub fn block_matrix(g: &Graph, category: Category, upper: &[NodeId], lower: &[NodeId], block: &Block) -> Result<SparseMatrix> {
    if block.num_rows() != upper.len() {
        return Err(Error::Dimension(format!(
            "block has {} rows for {} upper nodes",
            block.num_rows(),
            upper.len()
        )));
    }
    let d = |v: NodeId| (g.degree(v) + 1) as f64;
    let a = |v: NodeId, u: NodeId| 1.0 / (d(v) * d(u)).sqrt();
    let mut offsets = vec![0];
    let mut indices = Vec::new();
    let mut values = Vec::new();
    for (i, &v) in upper.iter().enumerate() {
        let row = block.row(i);
        match category {
            Category::NodeWise => {
                let self_col = lower
                    .binary_search(&v)
                    .map_err(|_| Error::invalid(format!("node {v} missing from its next layer")))?;
                indices.push(self_col as u32);
                values.push(1.0 / d(v));
                let scale = if row.is_empty() { 0.0 } else { g.degree(v) as f64 / row.len() as f64 };
                for &j in row {
                    indices.push(j);
                    values.push(scale * a(v, lower[j as usize]));
                }
            }
            Category::LayerWise => {
                let start = values.len();
                for &j in row {
                    indices.push(j);
                    values.push(a(v, lower[j as usize]));
                }
                let got: f64 = values[start..].iter().sum();
                if got > 0.0 {
                    let full: f64 = 1.0 / d(v) + g.neighbors(v).iter().map(|&u| a(v, u)).sum::<f64>();
                    values[start..].iter_mut().for_each(|x| *x *= full / got);
                }
            }
            Category::Subgraph => return Err(Error::invalid("subgraph results have no blocks")),
        }
        offsets.push(indices.len());
    }
    SparseMatrix::new(upper.len(), lower.len(), offsets, indices, values)
}

/// Inputs of one gradient step built from a sample.
struct Step {
    inner: SparseMatrix,
    outer: Option<SparseMatrix>,
    x: DenseMatrix,
    labels: Vec<u32>,
    mask: Vec<bool>,
}

fn build_step(g: &Graph, data: &Dataset, in_train: &[bool], r: &SampleResult) -> Result<Step> {
    match &r.adjacency {
        Adjacency::Subgraph(sub) => {
            let globals = r.id_map.globals();
            Ok(Step {
                inner: normalize_adj(sub),
                outer: None,
                x: data.features.select_rows(globals.iter().map(|&v| v as usize)),
                labels: globals.iter().map(|&v| data.labels[v as usize]).collect(),
                mask: globals.iter().map(|&v| in_train[v as usize]).collect(),
            })
        }
        Adjacency::Layered(blocks) => {
            if blocks.len() != 2 || r.layers.len() != 3 {
                return Err(Error::invalid(format!(
                    "a two-layer model needs two sampled hops, got {}",
                    blocks.len()
                )));
            }
            let outer = block_matrix(g, r.category, &r.layers[0], &r.layers[1], &blocks[0])?;
            let inner = block_matrix(g, r.category, &r.layers[1], &r.layers[2], &blocks[1])?;
            Ok(Step {
                inner,
                outer: Some(outer),
                x: data.features.select_rows(r.layers[2].iter().map(|&v| v as usize)),
                labels: r.layers[0].iter().map(|&v| data.labels[v as usize]).collect(),
                mask: vec![true; r.layers[0].len()],
            })
        }
    }
}

/// Trains the two-layer GCN with plain gradient descent.
///
/// Without a sampler config every epoch is one full-graph step on the
/// training nodes. With one, every epoch samples all batches and takes one
/// step per sample: subgraph samples train on the labeled training nodes of
/// the induced subgraph, layered samples on their batch nodes. Validation
/// and test accuracy are measured on the full graph.
pub fn train(
    g: &Graph,
    data: &Dataset,
    splits: &Splits,
    sampler_config: Option<&SamplerConfig>,
    opts: &TrainOptions,
) -> Result<TrainReport> {
    let start = Instant::now();
    if opts.epochs == 0 {
        return Err(Error::invalid("epochs must be at least 1"));
    }
    if !(opts.lr > 0.0 && opts.lr.is_finite()) || opts.hidden == 0 {
        return Err(Error::invalid("lr must be positive and hidden at least 1"));
    }
    if data.num_nodes() != g.num_nodes() {
        return Err(Error::Dimension(format!(
            "{} feature rows for {} nodes",
            data.num_nodes(),
            g.num_nodes()
        )));
    }
    splits.validate(g.num_nodes())?;

    let full = normalize_adj(g);
    let mut in_train = vec![false; g.num_nodes()];
    splits.train.iter().for_each(|&v| in_train[v as usize] = true);
    let mut params = ModelParams::init(
        data.features.cols(),
        opts.hidden,
        data.num_classes,
        derive_seed(opts.seed, "model"),
    );
    let sampler = sampler_config
        .map(|c| Sampler::init(g, &splits.train, c, opts.weights_cache.as_deref()))
        .transpose()?;

    let mut epochs = Vec::with_capacity(opts.epochs);
    let mut skipped = 0;
    for epoch in 0..opts.epochs {
        let t0 = Instant::now();
        let results = match &sampler {
            Some(s) => s.execute(epoch as u64)?.0,
            None => Vec::new(),
        };
        let sampling_seconds = t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let mut losses = Vec::new();
        if sampler.is_none() {
            let (loss, grad) = loss_and_grad(Propagation::full(&full), &data.features, &params, &data.labels, &in_train)?;
            params.w0.descend(&grad.w0, opts.lr)?;
            params.w1.descend(&grad.w1, opts.lr)?;
            losses.push(loss);
        }
        for r in &results {
            let step = build_step(g, data, &in_train, r)?;
            if !step.mask.contains(&true) {
                skipped += 1;
                continue;
            }
            let prop = Propagation {
                inner: &step.inner,
                outer: step.outer.as_ref().unwrap_or(&step.inner),
            };
            let (loss, grad) = loss_and_grad(prop, &step.x, &params, &step.labels, &step.mask)?;
            params.w0.descend(&grad.w0, opts.lr)?;
            params.w1.descend(&grad.w1, opts.lr)?;
            losses.push(loss);
        }
        let compute_seconds = t1.elapsed().as_secs_f64();
        if !(params.w0.all_finite() && params.w1.all_finite()) {
            return Err(Error::invalid(format!("weights diverged in epoch {epoch}; lower the learning rate")));
        }

        let logits = gcn_forward(&full, &data.features, &params)?;
        epochs.push(EpochRecord {
            epoch,
            sampling_seconds,
            compute_seconds,
            epoch_seconds: t0.elapsed().as_secs_f64(),
            loss: if losses.is_empty() { f64::NAN } else { losses.iter().sum::<f64>() / losses.len() as f64 },
            val_accuracy: accuracy(&logits, &data.labels, &splits.val),
            fallback_count: results.iter().map(|r| r.fallback_count).sum(),
        });
    }

    let logits = gcn_forward(&full, &data.features, &params)?;
    Ok(TrainReport {
        epochs,
        test_accuracy: accuracy(&logits, &data.labels, &splits.test),
        init_seconds: sampler.as_ref().map_or(0.0, |s| s.init_report().init_seconds),
        total_seconds: start.elapsed().as_secs_f64(),
        eligible_fraction: sampler.as_ref().and_then(|s| s.init_report().eligible_fraction),
        skipped_batches: skipped,
    })
}
