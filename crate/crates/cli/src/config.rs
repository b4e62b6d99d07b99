//! Flat `key=value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Keys carry a section
//! prefix (`graph.`, `sampler.`, `locality.`, `cache.`, `train.`,
//! `sweep.`) except the top-level `seed`, `out` and `jobs`. Relative paths
//! resolve against the directory of the config file. Unknown keys are
//! errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gsampler::analysis::CacheConfig;
use gsampler::samplers::Category;
use gsampler::LocalityParams;

use crate::error::{CliError, CliResult};

const KEYS: &[&str] = &[
    "seed",
    "out",
    "jobs",
    "graph.path",
    "graph.directed",
    "graph.generator",
    "graph.clusters",
    "graph.nodes_per_cluster",
    "graph.p_intra",
    "graph.p_inter",
    "graph.shuffle",
    "graph.noise",
    "graph.features",
    "graph.splits",
    "sampler.category",
    "sampler.batch_size",
    "sampler.fanouts",
    "sampler.layer_sizes",
    "sampler.budget",
    "locality.n",
    "locality.s",
    "locality.rho",
    "locality.weights",
    "cache.line_bytes",
    "cache.l2_lines",
    "cache.l3_lines",
    "cache.bytes_per_node_entry",
    "train.epochs",
    "train.lr",
    "train.hidden",
    "train.train_frac",
    "train.val_frac",
    "sweep.n",
    "sweep.s",
];

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    File { path: PathBuf, directed: bool },
    Clustered(GeneratorSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub clusters: usize,
    pub nodes_per_cluster: usize,
    pub p_intra: f64,
    pub p_inter: f64,
    pub shuffle: bool,
    /// Deviation of the Gaussian noise on planted features.
    pub noise: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerSection {
    /// `None` trains on the full graph.
    pub category: Option<Category>,
    pub batch_size: usize,
    pub fanouts: Vec<usize>,
    pub layer_sizes: Vec<usize>,
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainSection {
    pub epochs: usize,
    pub lr: f64,
    pub hidden: usize,
    pub train_frac: f64,
    pub val_frac: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub jobs: Option<usize>,
    pub graph: GraphSource,
    pub features: Option<PathBuf>,
    pub splits: Option<PathBuf>,
    pub sampler: SamplerSection,
    pub locality: LocalityParams,
    /// Weight cache file; `<out>/weights.gslw` when unset.
    pub weights: Option<PathBuf>,
    pub cache: CacheConfig,
    pub train: TrainSection,
    pub sweep_n: Vec<usize>,
    pub sweep_s: Vec<f64>,
}

struct Entry {
    value: String,
    at: String,
    base: Option<PathBuf>,
}

/// Raw entries before typing; later sources override earlier ones.
#[derive(Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

fn config_err(at: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        at: at.to_string(),
        message: message.into(),
    }
}

impl RawConfig {
    pub fn parse(text: &str, base: Option<&Path>) -> CliResult<Self> {
        let mut raw = Self::default();
        for (i, line) in text.lines().enumerate() {
            let at = format!("line {}", i + 1);
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(&at, format!("expected key = value, got {line:?}")))?;
            let k = k.trim();
            if raw.entries.contains_key(k) {
                return Err(config_err(&at, format!("duplicate key {k}")));
            }
            raw.insert(k, v.trim(), at, base)?;
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path.parent())
    }

    /// Sets `key` from a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> CliResult<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| config_err("--set", format!("expected key=value, got {assignment:?}")))?;
        self.insert(k.trim(), v.trim(), "--set".into(), None)
    }

    fn insert(&mut self, key: &str, value: &str, at: String, base: Option<&Path>) -> CliResult<()> {
        if !KEYS.contains(&key) {
            return Err(config_err(&at, format!("unknown key {key}")));
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                at,
                base: base.map(Path::to_path_buf),
            },
        );
        Ok(())
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|e| {
                e.value
                    .parse()
                    .map_err(|err| config_err(&e.at, format!("{key}: {err}")))
            })
            .transpose()
    }

    fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    fn list<T: FromStr>(&self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.entries
            .get(key)
            .map(|e| parse_list(&e.value).map_err(|err| config_err(&e.at, format!("{key}: {err}"))))
            .transpose()
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.entries.get(key).map(|e| match &e.base {
            Some(base) if Path::new(&e.value).is_relative() => base.join(&e.value),
            _ => PathBuf::from(&e.value),
        })
    }

    /// An input path that must exist now.
    fn existing_path(&self, key: &str) -> CliResult<Option<PathBuf>> {
        match self.path(key) {
            Some(p) if !p.exists() => Err(config_err(
                &self.entries[key].at,
                format!("{key}: {} does not exist", p.display()),
            )),
            p => Ok(p),
        }
    }

    fn generator(&self) -> CliResult<GeneratorSpec> {
        Ok(GeneratorSpec {
            clusters: self.get_or("graph.clusters", 8)?,
            nodes_per_cluster: self.get_or("graph.nodes_per_cluster", 256)?,
            p_intra: self.get_or("graph.p_intra", 0.1)?,
            p_inter: self.get_or("graph.p_inter", 0.005)?,
            shuffle: self.get_or("graph.shuffle", false)?,
            noise: self.get_or("graph.noise", 0.5)?,
        })
    }

    pub fn build(&self) -> CliResult<ExperimentConfig> {
        let seed = self
            .get("seed")?
            .ok_or_else(|| config_err("seed", "a seed is required (--seed or seed = ...)"))?;
        let out = self.path("out").unwrap_or_else(|| PathBuf::from("out"));
        let jobs: Option<usize> = self.get("jobs")?;
        if jobs == Some(0) {
            return Err(config_err("jobs", "jobs must be at least 1"));
        }

        let graph = match (self.existing_path("graph.path")?, self.get::<String>("graph.generator")?) {
            (Some(_), Some(_)) => {
                return Err(config_err("graph", "set either graph.path or graph.generator, not both"))
            }
            (Some(path), None) => GraphSource::File {
                path,
                directed: self.get_or("graph.directed", false)?,
            },
            (None, None) => GraphSource::Clustered(self.generator()?),
            (None, Some(kind)) if kind == "clustered" => GraphSource::Clustered(self.generator()?),
            (None, Some(kind)) => {
                return Err(config_err("graph.generator", format!("unknown generator {kind:?}")))
            }
        };

        let category = match self.get::<String>("sampler.category")?.as_deref() {
            None => Some(Category::Subgraph),
            Some("full") => None,
            Some(c) => Some(
                c.parse()
                    .map_err(|e: gsampler::Error| config_err(&self.entries["sampler.category"].at, e.to_string()))?,
            ),
        };
        let sampler = SamplerSection {
            category,
            batch_size: self.get_or("sampler.batch_size", 64)?,
            fanouts: self.list("sampler.fanouts")?.unwrap_or_else(|| vec![10, 5]),
            layer_sizes: self.list("sampler.layer_sizes")?.unwrap_or_else(|| vec![256, 256]),
            budget: self.get_or("sampler.budget", 128)?,
        };

        let defaults = LocalityParams::default();
        let locality = LocalityParams::new(
            self.get_or("locality.n", defaults.min_neighbors)?,
            self.get_or("locality.s", defaults.similarity_threshold)?,
        )
        .with_parent_reuse(self.get_or("locality.rho", defaults.parent_reuse_ratio)?);
        locality.validate()?;

        let d = CacheConfig::default();
        let cache = CacheConfig::new(
            self.get_or("cache.line_bytes", d.line_bytes())?,
            self.get_or("cache.l2_lines", d.l2_lines())?,
            self.get_or("cache.l3_lines", d.l3_lines())?,
            self.get_or("cache.bytes_per_node_entry", d.bytes_per_node_entry())?,
        )?;

        let train = TrainSection {
            epochs: self.get_or("train.epochs", 200)?,
            lr: self.get_or("train.lr", 0.5)?,
            hidden: self.get_or("train.hidden", 16)?,
            train_frac: self.get_or("train.train_frac", 0.6)?,
            val_frac: self.get_or("train.val_frac", 0.2)?,
        };

        Ok(ExperimentConfig {
            seed,
            out,
            jobs,
            graph,
            features: self.existing_path("graph.features")?,
            splits: self.existing_path("graph.splits")?,
            sampler,
            locality,
            weights: self.path("locality.weights"),
            cache,
            train,
            sweep_n: self.list("sweep.n")?.unwrap_or_else(|| vec![locality.min_neighbors]),
            sweep_s: self.list("sweep.s")?.unwrap_or_else(|| vec![locality.similarity_threshold]),
        })
    }
}

pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<T> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| format!("{s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

impl ExperimentConfig {
    pub fn weights_path(&self) -> PathBuf {
        self.weights.clone().unwrap_or_else(|| self.out.join("weights.gslw"))
    }
}
