//! Instrumentation for sampler output: a trace-driven cache hierarchy and
//! topology metrics of sampled subgraphs.

mod cache;
mod compare;
mod topology;

pub use cache::{simulate_cache, simulate_stream, CacheConfig, CacheSim, CacheStats, LruCache};
pub use compare::{arm_metrics, compare_runs, describe_ratio, ArmSummary, BatchMetrics, ComparisonReport, Ratios};
pub use topology::{closed_triads, clustering_coefficient, local_triangles, topology, TopologyReport};
