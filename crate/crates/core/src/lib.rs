//! Graph sampling for GNN training with a shared INIT/EXECUTE structure,
//! plus locality-aware sampling weights that steer samplers toward nodes
//! whose neighbor ids are close together.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: CSR graphs, node sets, induced subgraphs, generators and I/O.
//! - [`locality`]: per-node neighbor-id similarity and the weights built from it.
//! - [`samplers`]: node-wise, layer-wise and subgraph samplers.
//! - [`analysis`]: cache simulation over sampler traces and subgraph topology.
//! - [`trainer`]: a small two-layer GCN trained on sampler output.

mod codec;
pub mod analysis;
pub mod error;
pub mod graph;
pub mod locality;
pub mod report;
pub mod rng;
pub mod samplers;
pub mod trainer;

pub use error::{Error, Result};
pub use graph::{Graph, IdMap, NodeId, NodeSet};
pub use locality::{LocalityParams, LocalityWeights, WeightMode};
pub use rng::RngStream;
pub use samplers::{Category, SampleResult, SamplerConfig};
