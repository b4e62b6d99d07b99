use std::path::Path;
use web_time::Instant;

use serde::{Deserialize, Serialize};

use super::choice::PreparedChoice;
use super::{
    get_batches, layer_wise_sample, node_wise_sample, subgraph, Batch, Category, SampleResult,
    SamplerConfig,
};
use crate::error::Result;
use crate::graph::{Graph, NodeId};
use crate::locality::{construct_locality, load_weights, save_weights, LocalityWeights};
use crate::rng::{derive_seed, RngStream};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitReport {
    pub init_seconds: f64,
    pub num_batches: usize,
    /// Locality weights were read from the cache file instead of constructed.
    pub weights_from_cache: bool,
    pub eligible_fraction: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SamplerTiming {
    pub init_seconds: f64,
    pub execute_seconds: Vec<f64>,
}

/// Output of one INIT + EXECUTE pass.
#[derive(Clone, Debug)]
pub struct SamplerRun {
    pub results: Vec<SampleResult>,
    pub timing: SamplerTiming,
    pub init: InitReport,
}

/// A sampler after INIT: batches and locality weights are fixed, and any
/// number of EXECUTE passes can follow.
#[derive(Debug)]
pub struct Sampler<'g> {
    graph: &'g Graph,
    config: SamplerConfig,
    batches: Vec<Batch>,
    weights: Option<LocalityWeights>,
    /// Whole-graph distribution for the subgraph category.
    pool_choice: Option<PreparedChoice>,
    init: InitReport,
    stream_seed: u64,
}

impl<'g> Sampler<'g> {
    /// INIT stage. With locality enabled for node-wise or subgraph sampling,
    /// weights are loaded from `weights_cache` when it holds a valid file for
    /// this graph and these parameters, and constructed (then written back to
    /// `weights_cache`) otherwise.
    pub fn init(
        graph: &'g Graph,
        train_nodes: &[NodeId],
        config: &SamplerConfig,
        weights_cache: Option<&Path>,
    ) -> Result<Self> {
        let start = Instant::now();
        config.validate()?;
        let batches = get_batches(train_nodes, config.batch_size)?;
        if let Some(&v) = train_nodes.iter().find(|&&v| v as usize >= graph.num_nodes()) {
            return Err(crate::error::Error::invalid(format!("training node {v} out of range")));
        }

        let mut from_cache = false;
        let weights = match (config.category, &config.locality) {
            (Category::LayerWise, _) => None,
            (_, None) => Some(LocalityWeights::uniform(graph)),
            (_, Some(params)) => {
                let cached = weights_cache
                    .filter(|p| p.exists())
                    .and_then(|p| load_weights(p, graph).ok())
                    .filter(|w| w.params == *params);
                match cached {
                    Some(w) => {
                        from_cache = true;
                        Some(w)
                    }
                    None => {
                        let w = construct_locality(graph, params)?;
                        if let Some(p) = weights_cache {
                            save_weights(&w, p)?;
                        }
                        Some(w)
                    }
                }
            }
        };
        let pool_choice = match (config.category, &weights) {
            (Category::Subgraph, Some(w)) => {
                let all: Vec<NodeId> = (0..graph.num_nodes() as NodeId).collect();
                Some(PreparedChoice::new(&all, w)?)
            }
            _ => None,
        };
        let eligible_fraction = match (&config.locality, &weights) {
            (Some(_), Some(w)) => Some(w.eligible_fraction()),
            _ => None,
        };
        let init = InitReport {
            init_seconds: start.elapsed().as_secs_f64(),
            num_batches: batches.len(),
            weights_from_cache: from_cache,
            eligible_fraction,
        };
        Ok(Self {
            graph,
            config: config.clone(),
            batches,
            weights,
            pool_choice,
            init,
            stream_seed: derive_seed(config.seed, "sampler"),
        })
    }

    pub fn batches(&self) -> &[Batch] {
        &self.batches
    }

    pub fn weights(&self) -> Option<&LocalityWeights> {
        self.weights.as_ref()
    }

    pub fn init_report(&self) -> &InitReport {
        &self.init
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.config
    }

    /// Random stream for a batch in a given epoch.
    fn rng_for(&self, epoch: u64, batch_index: usize) -> RngStream {
        RngStream::new(self.stream_seed, (epoch << 32) | batch_index as u64)
    }

    /// Samples one batch. The result depends only on the seed, the epoch and
    /// the batch index.
    pub fn sample_batch(&self, batch: &Batch, epoch: u64) -> Result<SampleResult> {
        let mut rng = self.rng_for(epoch, batch.batch_index);
        match self.config.category {
            Category::NodeWise => node_wise_sample(
                self.graph,
                batch,
                &self.config,
                self.weights.as_ref().expect("weights set in init"),
                &mut rng,
            ),
            Category::LayerWise => layer_wise_sample(self.graph, batch, &self.config, &mut rng),
            Category::Subgraph => subgraph::sample_prepared(
                self.graph,
                &self.config,
                self.pool_choice.as_ref().expect("pool prepared in init"),
                batch.batch_index,
                &mut rng,
            ),
        }
    }

    /// EXECUTE stage: samples every batch, returning results in batch order
    /// with the wall time of each.
    pub fn execute(&self, epoch: u64) -> Result<(Vec<SampleResult>, Vec<f64>)> {
        let timed = |b: &Batch| -> Result<(SampleResult, f64)> {
            let t = Instant::now();
            let r = self.sample_batch(b, epoch)?;
            Ok((r, t.elapsed().as_secs_f64()))
        };
        #[cfg(feature = "parallel")]
        let out: Vec<_> = self.batches.par_iter().map(timed).collect::<Result<_>>()?;
        #[cfg(not(feature = "parallel"))]
        let out: Vec<_> = self.batches.iter().map(timed).collect::<Result<_>>()?;
        Ok(out.into_iter().unzip())
    }
}

/// INIT followed by one EXECUTE pass.
pub fn run_sampler(
    g: &Graph,
    train_nodes: &[NodeId],
    config: &SamplerConfig,
    weights_cache: Option<&Path>,
) -> Result<SamplerRun> {
    let sampler = Sampler::init(g, train_nodes, config, weights_cache)?;
    let (results, execute_seconds) = sampler.execute(0)?;
    Ok(SamplerRun {
        results,
        timing: SamplerTiming {
            init_seconds: sampler.init.init_seconds,
            execute_seconds,
        },
        init: sampler.init.clone(),
    })
}
