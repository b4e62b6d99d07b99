use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometry of the simulated two-level hierarchy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheConfig {
    line_bytes: u64,
    l2_lines: usize,
    l3_lines: usize,
    bytes_per_node_entry: u64,
}

impl Default for CacheConfig {
    fn default() -> Self {
        Self {
            line_bytes: 64,
            l2_lines: 4096,
            l3_lines: 32768,
            bytes_per_node_entry: 256,
        }
    }
}

impl CacheConfig {
    pub fn new(line_bytes: u64, l2_lines: usize, l3_lines: usize, bytes_per_node_entry: u64) -> Result<Self> {
        if !line_bytes.is_power_of_two() {
            return Err(Error::invalid(format!("line size {line_bytes} is not a power of two")));
        }
        if l2_lines == 0 || l3_lines < l2_lines {
            return Err(Error::invalid(format!(
                "need l3_lines >= l2_lines >= 1, got l2={l2_lines} l3={l3_lines}"
            )));
        }
        if bytes_per_node_entry == 0 {
            return Err(Error::invalid("bytes_per_node_entry must be positive"));
        }
        Ok(Self {
            line_bytes,
            l2_lines,
            l3_lines,
            bytes_per_node_entry,
        })
    }

    pub fn line_bytes(&self) -> u64 {
        self.line_bytes
    }

    pub fn l2_lines(&self) -> usize {
        self.l2_lines
    }

    pub fn l3_lines(&self) -> usize {
        self.l3_lines
    }

    pub fn bytes_per_node_entry(&self) -> u64 {
        self.bytes_per_node_entry
    }

    #[inline]
    pub fn line_of(&self, position: u64) -> u64 {
        (u128::from(position) * u128::from(self.bytes_per_node_entry) / u128::from(self.line_bytes)) as u64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub accesses: u64,
    /// L2 misses, each a transfer from L3.
    pub l2_to_l3: u64,
    /// L3 misses, each a transfer from DRAM.
    pub l3_to_dram: u64,
}

/// Fully associative LRU set of cache lines.
#[derive(Clone, Debug)]
pub struct LruCache {
    capacity: usize,
    clock: u64,
    stamp_of: HashMap<u64, u64>,
    by_stamp: BTreeMap<u64, u64>,
}

impl LruCache {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            clock: 0,
            stamp_of: HashMap::with_capacity(capacity.min(1 << 16)),
            by_stamp: BTreeMap::new(),
        }
    }

    /// Touches `line`, returning whether it was resident. Misses insert the
    /// line, evicting the least recently used one when full.
    pub fn access(&mut self, line: u64) -> bool {
        self.clock += 1;
        if let Some(stamp) = self.stamp_of.insert(line, self.clock) {
            self.by_stamp.remove(&stamp);
            self.by_stamp.insert(self.clock, line);
            return true;
        }
        self.by_stamp.insert(self.clock, line);
        if self.stamp_of.len() > self.capacity {
            let (_, victim) = self.by_stamp.pop_first().expect("non-empty when over capacity");
            self.stamp_of.remove(&victim);
        }
        false
    }

    pub fn len(&self) -> usize {
        self.stamp_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stamp_of.is_empty()
    }
}

/// Two-level hierarchy whose contents persist across traces. An L2 miss
/// probes L3; an L3 miss fetches from DRAM. Every access leaves its line
/// most recent in L2, and every L2 miss leaves it most recent in L3.
#[derive(Clone, Debug)]
pub struct CacheSim {
    config: CacheConfig,
    l2: LruCache,
    l3: LruCache,
}

impl CacheSim {
    pub fn new(config: &CacheConfig) -> Self {
        Self {
            config: *config,
            l2: LruCache::new(config.l2_lines),
            l3: LruCache::new(config.l3_lines),
        }
    }

    /// Replays `trace`, returning the counts it caused.
    pub fn run(&mut self, trace: &[u64]) -> CacheStats {
        let mut stats = CacheStats::default();
        for &p in trace {
            let line = self.config.line_of(p);
            stats.accesses += 1;
            if self.l2.access(line) {
                continue;
            }
            stats.l2_to_l3 += 1;
            if !self.l3.access(line) {
                stats.l3_to_dram += 1;
            }
        }
        stats
    }
}

/// Replays `trace` through a cold L2/L3 pair.
pub fn simulate_cache(trace: &[u64], config: &CacheConfig) -> CacheStats {
    CacheSim::new(config).run(trace)
}

/// Replays traces in order through one hierarchy that starts cold and stays
/// warm between them; entry `i` holds the counts caused by trace `i`.
pub fn simulate_stream<'a>(traces: impl IntoIterator<Item = &'a [u64]>, config: &CacheConfig) -> Vec<CacheStats> {
    let mut sim = CacheSim::new(config);
    traces.into_iter().map(|t| sim.run(t)).collect()
}
