//! The unified sampling model.
//!
//! Every sampler runs in two stages. INIT ([`Sampler::init`]) splits the
//! training nodes into batches and loads or constructs the locality weights,
//! once. EXECUTE ([`Sampler::execute`]) loops over the batches and calls the
//! category sampler for each, producing a [`SampleResult`] with the sampled
//! nodes, the batched adjacency and the trace of neighbor reads.
//!
//! One representative per category is provided:
//!
//! * node-wise ([`node_wise_sample`]): per-node neighbor draws over hops;
//! * layer-wise ([`layer_wise_sample`]): a fixed number of nodes per layer
//!   drawn from the union of the layer above's neighbors;
//! * subgraph ([`subgraph_sample`]): a node pool drawn over the whole graph,
//!   sorted, deduplicated and induced into a subgraph.

mod choice;
mod export;
mod layer_wise;
mod node_wise;
mod run;
mod subgraph;

pub use choice::{weighted_choice, Draw, PreparedChoice};
pub use export::{read_trace, result_to_json, write_trace, TRACE_MAGIC};
pub use layer_wise::layer_wise_sample;
pub use node_wise::node_wise_sample;
pub use run::{run_sampler, InitReport, Sampler, SamplerRun, SamplerTiming};
pub use subgraph::subgraph_sample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, IdMap, NodeId, NodeSet};
use crate::locality::LocalityParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    NodeWise,
    LayerWise,
    Subgraph,
}

impl Category {
    pub fn as_str(&self) -> &'static str {
        match self {
            Category::NodeWise => "node_wise",
            Category::LayerWise => "layer_wise",
            Category::Subgraph => "subgraph",
        }
    }
}

impl std::str::FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node_wise" | "node" => Ok(Category::NodeWise),
            "layer_wise" | "layer" => Ok(Category::LayerWise),
            "subgraph" => Ok(Category::Subgraph),
            other => Err(Error::invalid(format!("unknown sampler category {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub category: Category,
    pub batch_size: usize,
    /// Per-hop neighbor counts (node-wise).
    pub fanouts: Vec<usize>,
    /// Per-layer node counts (layer-wise).
    pub layer_sizes: Vec<usize>,
    /// Distinct nodes per subgraph (subgraph).
    pub subgraph_budget: usize,
    pub seed: u64,
    /// `None` samples without locality (the vanilla arm).
    pub locality: Option<LocalityParams>,
}

impl SamplerConfig {
    pub fn node_wise(batch_size: usize, fanouts: Vec<usize>, seed: u64) -> Self {
        Self {
            category: Category::NodeWise,
            batch_size,
            fanouts,
            layer_sizes: Vec::new(),
            subgraph_budget: 0,
            seed,
            locality: None,
        }
    }

    pub fn layer_wise(batch_size: usize, layer_sizes: Vec<usize>, seed: u64) -> Self {
        Self {
            category: Category::LayerWise,
            layer_sizes,
            fanouts: Vec::new(),
            ..Self::node_wise(batch_size, Vec::new(), seed)
        }
    }

    pub fn subgraph(batch_size: usize, subgraph_budget: usize, seed: u64) -> Self {
        Self {
            category: Category::Subgraph,
            subgraph_budget,
            ..Self::node_wise(batch_size, Vec::new(), seed)
        }
    }

    pub fn with_locality(mut self, params: LocalityParams) -> Self {
        self.locality = Some(params);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be at least 1"));
        }
        let positive = |name: &str, xs: &[usize]| {
            if xs.is_empty() || xs.contains(&0) {
                Err(Error::invalid(format!("{name} must be a non-empty list of sizes >= 1")))
            } else {
                Ok(())
            }
        };
        match self.category {
            Category::NodeWise => positive("fanouts", &self.fanouts)?,
            Category::LayerWise => positive("layer_sizes", &self.layer_sizes)?,
            Category::Subgraph => {
                if self.subgraph_budget == 0 {
                    return Err(Error::invalid("subgraph_budget must be at least 1"));
                }
            }
        }
        if let Some(p) = &self.locality {
            p.validate()?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batch {
    pub node_ids: Vec<NodeId>,
    pub batch_index: usize,
}

/// Splits `train_nodes`, in order, into consecutive batches of `batch_size`
/// (the last one may be shorter).
pub fn get_batches(train_nodes: &[NodeId], batch_size: usize) -> Result<Vec<Batch>> {
    if batch_size == 0 {
        return Err(Error::invalid("batch_size must be at least 1"));
    }
    if train_nodes.is_empty() {
        return Err(Error::invalid("no training nodes to batch"));
    }
    Ok(train_nodes
        .chunks(batch_size)
        .enumerate()
        .map(|(batch_index, c)| Batch {
            node_ids: c.to_vec(),
            batch_index,
        })
        .collect())
}

/// Bipartite block between consecutive layers: row `i` lists, as indices
/// into the lower layer, the nodes that upper-layer node `i` aggregates from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub offsets: Vec<usize>,
    pub sources: Vec<u32>,
}

impl Block {
    pub fn num_rows(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.sources[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn num_entries(&self) -> usize {
        self.sources.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Adjacency {
    /// `blocks[h]` connects `layers[h]` (rows) to `layers[h + 1]` (sources).
    Layered(Vec<Block>),
    /// Induced subgraph over `layers[0]`, in local ids.
    Subgraph(Graph),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleResult {
    pub category: Category,
    pub batch_index: usize,
    /// Original ids per hop/layer. `layers[0]` holds the batch (node-wise,
    /// layer-wise) or the processed node pool (subgraph).
    pub layers: Vec<Vec<NodeId>>,
    pub adjacency: Adjacency,
    /// Dense relabeling of every sampled node.
    pub id_map: IdMap,
    /// Node ids whose per-node entries were read, in access order.
    pub access_trace: Vec<u64>,
    pub fallback_count: usize,
    pub warnings: Vec<String>,
}

impl SampleResult {
    pub fn subgraph(&self) -> Option<&Graph> {
        match &self.adjacency {
            Adjacency::Subgraph(g) => Some(g),
            Adjacency::Layered(_) => None,
        }
    }

    pub fn blocks(&self) -> Option<&[Block]> {
        match &self.adjacency {
            Adjacency::Layered(b) => Some(b),
            Adjacency::Subgraph(_) => None,
        }
    }

    pub fn num_sampled(&self) -> usize {
        self.id_map.len()
    }
}

/// Sorted union of all layers.
pub(crate) fn union_map(layers: &[Vec<NodeId>]) -> IdMap {
    IdMap::new(&NodeSet::new(layers.iter().flatten().copied().collect()))
}
