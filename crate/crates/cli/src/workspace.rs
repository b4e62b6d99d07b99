//! Loads the graph, dataset and splits an experiment runs on.

use gsampler::graph::{generate_clustered, load_csr, load_edge_list, ClusteredGraph};
use gsampler::rng::derive_seed;
use gsampler::trainer::{load_dataset, load_splits, planted_dataset, random_splits, Dataset, DenseMatrix, Splits};
use gsampler::{Graph, NodeId};

use crate::config::{ExperimentConfig, GeneratorSpec, GraphSource};
use crate::error::{usage, CliResult};

pub struct Workspace {
    pub graph: Graph,
    pub dataset: Option<Dataset>,
    pub splits: Option<Splits>,
}

pub fn generate(spec: &GeneratorSpec, seed: u64) -> CliResult<ClusteredGraph> {
    let cg = generate_clustered(
        spec.clusters,
        spec.nodes_per_cluster,
        spec.p_intra,
        spec.p_inter,
        derive_seed(seed, "graph"),
    )?;
    Ok(if spec.shuffle {
        cg.shuffled(derive_seed(seed, "shuffle"))
    } else {
        cg
    })
}

pub fn load_graph(cfg: &ExperimentConfig) -> CliResult<Graph> {
    Ok(match &cfg.graph {
        GraphSource::File { path, directed } => {
            if path.extension().is_some_and(|e| e == "gsmp") {
                load_csr(path)?
            } else {
                load_edge_list(path, *directed)?
            }
        }
        GraphSource::Clustered(spec) => generate(spec, cfg.seed)?.graph,
    })
}

impl Workspace {
    pub fn load(cfg: &ExperimentConfig) -> CliResult<Self> {
        let (graph, planted) = match &cfg.graph {
            GraphSource::Clustered(spec) => {
                let cg = generate(spec, cfg.seed)?;
                let data = match &cfg.features {
                    Some(_) => None,
                    None => Some(planted_dataset(&cg, spec.noise, cfg.seed)?),
                };
                (cg.graph, data)
            }
            GraphSource::File { .. } => (load_graph(cfg)?, None),
        };
        let dataset = match &cfg.features {
            Some(p) => Some(load_dataset(p)?),
            None => planted,
        };
        let splits = match (&cfg.splits, &dataset) {
            (Some(p), _) => Some(load_splits(p)?),
            (None, Some(_)) => Some(random_splits(
                graph.num_nodes(),
                cfg.train.train_frac,
                cfg.train.val_frac,
                cfg.seed,
            )?),
            (None, None) => None,
        };
        if let Some(s) = &splits {
            s.validate(graph.num_nodes())?;
        }
        Ok(Self {
            graph,
            dataset,
            splits,
        })
    }

    /// Nodes that form batches: the training split, or every node.
    pub fn train_nodes(&self) -> Vec<NodeId> {
        match &self.splits {
            Some(s) => s.train.clone(),
            None => (0..self.graph.num_nodes() as NodeId).collect(),
        }
    }

    pub fn require_training_data(&self) -> CliResult<(&Dataset, &Splits)> {
        match (&self.dataset, &self.splits) {
            (Some(d), Some(s)) => Ok((d, s)),
            _ => Err(usage(
                "training needs features: use the clustered generator or set graph.features",
            )),
        }
    }
}

/// Moves row `v` of the dataset to row `perm[v]`.
pub fn permute_dataset(d: &Dataset, perm: &[NodeId]) -> CliResult<Dataset> {
    let (n, k) = (d.features.rows(), d.features.cols());
    let mut data = vec![0.0; n * k];
    let mut labels = vec![0; n];
    for (old, &new) in perm.iter().enumerate() {
        let new = new as usize;
        data[new * k..(new + 1) * k].copy_from_slice(d.features.row(old));
        labels[new] = d.labels[old];
    }
    Ok(Dataset::new(DenseMatrix::from_vec(n, k, data)?, labels, d.num_classes)?)
}

pub fn permute_splits(s: &Splits, perm: &[NodeId]) -> Splits {
    let map = |ids: &[NodeId]| {
        let mut v: Vec<NodeId> = ids.iter().map(|&x| perm[x as usize]).collect();
        v.sort_unstable();
        v
    };
    Splits {
        train: map(&s.train),
        val: map(&s.val),
        test: map(&s.test),
    }
}
