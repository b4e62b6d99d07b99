use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::{ClusteredGraph, NodeId};
use crate::rng::RngStream;

/// Node features with one class label per node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: DenseMatrix,
    pub labels: Vec<u32>,
    pub num_classes: usize,
}

impl Dataset {
    pub fn new(features: DenseMatrix, labels: Vec<u32>, num_classes: usize) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::Dimension(format!(
                "{} labels for {} feature rows",
                labels.len(),
                features.rows()
            )));
        }
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= num_classes) {
            return Err(Error::invalid(format!("label {l} out of range for {num_classes} classes")));
        }
        Ok(Self {
            features,
            labels,
            num_classes,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.labels.len()
    }
}

/// One-hot cluster indicator plus Gaussian noise of deviation `noise`, with
/// the cluster as label.
pub fn planted_dataset(cg: &ClusteredGraph, noise: f64, seed: u64) -> Result<Dataset> {
    let k = cg.num_clusters;
    let normal = Normal::new(0.0, noise).map_err(|e| Error::invalid(format!("noise {noise}: {e}")))?;
    let mut rng = RngStream::for_component(seed, "features");
    let mut data = Vec::with_capacity(cg.labels.len() * k);
    for &l in &cg.labels {
        for c in 0..k {
            data.push(f64::from(u8::from(c == l as usize)) + normal.sample(&mut rng));
        }
    }
    Dataset::new(DenseMatrix::from_vec(cg.labels.len(), k, data)?, cg.labels.clone(), k)
}

/// Text form: a `nodes dim classes` header, then per node its features and
/// its label, space separated.
pub fn write_dataset(d: &Dataset) -> String {
    let f = &d.features;
    let mut s = format!("{} {} {}\n", f.rows(), f.cols(), d.num_classes);
    for (i, &l) in d.labels.iter().enumerate() {
        for x in f.row(i) {
            write!(s, "{x} ").unwrap();
        }
        writeln!(s, "{l}").unwrap();
    }
    s
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let head: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| parse_err(1, format!("header: {e}")))?;
    let [n, dim, classes] = head[..] else {
        return Err(parse_err(1, "header must be `nodes dim classes`"));
    };
    let mut data = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for (i, line) in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != dim + 1 {
            return Err(parse_err(i + 1, format!("expected {} fields, found {}", dim + 1, fields.len())));
        }
        for f in &fields[..dim] {
            data.push(f.parse::<f64>().map_err(|e| parse_err(i + 1, format!("{f:?}: {e}")))?);
        }
        labels.push(fields[dim].parse::<u32>().map_err(|e| parse_err(i + 1, format!("label: {e}")))?);
    }
    if labels.len() != n {
        return Err(parse_err(0, format!("header declares {n} nodes, found {}", labels.len())));
    }
    Dataset::new(DenseMatrix::from_vec(n, dim, data)?, labels, classes)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let p = path.as_ref();
    parse_dataset(&std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?)
}

/// Train, validation and test node ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<NodeId>,
    pub val: Vec<NodeId>,
    pub test: Vec<NodeId>,
}

impl Splits {
    pub fn validate(&self, num_nodes: usize) -> Result<()> {
        if self.train.is_empty() {
            return Err(Error::invalid("empty training split"));
        }
        let mut seen = vec![false; num_nodes];
        for &v in self.train.iter().chain(&self.val).chain(&self.test) {
            let slot = seen
                .get_mut(v as usize)
                .ok_or_else(|| Error::invalid(format!("split node {v} out of range")))?;
            if std::mem::replace(slot, true) {
                return Err(Error::invalid(format!("node {v} appears in more than one split")));
            }
        }
        Ok(())
    }
}

/// Random disjoint splits with the given shares; the test split gets the rest.
pub fn random_splits(num_nodes: usize, train: f64, val: f64, seed: u64) -> Result<Splits> {
    if !(train > 0.0 && val >= 0.0 && train + val <= 1.0) {
        return Err(Error::invalid(format!("bad split shares {train}/{val}")));
    }
    let mut ids: Vec<NodeId> = (0..num_nodes as NodeId).collect();
    ids.shuffle(&mut RngStream::for_component(seed, "splits"));
    let a = ((num_nodes as f64 * train).round() as usize).max(1).min(num_nodes);
    let b = (a + (num_nodes as f64 * val).round() as usize).min(num_nodes);
    let part = |r: std::ops::Range<usize>| {
        let mut v = ids[r].to_vec();
        v.sort_unstable();
        v
    };
    Ok(Splits {
        train: part(0..a),
        val: part(a..b),
        test: part(b..num_nodes),
    })
}

pub fn write_splits(s: &Splits) -> String {
    let line = |v: &[NodeId]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    format!("{}\n{}\n{}\n", line(&s.train), line(&s.val), line(&s.test))
}

pub fn parse_splits(text: &str) -> Result<Splits> {
    let mut parts = Vec::with_capacity(3);
    for (i, line) in text.lines().enumerate() {
        if parts.len() == 3 {
            if line.trim().is_empty() {
                continue;
            }
            return Err(parse_err(i + 1, "more than three split lines"));
        }
        let ids = line
            .split_whitespace()
            .map(str::parse::<NodeId>)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(i + 1, e.to_string()))?;
        parts.push(ids);
    }
    parts.resize(3, Vec::new());
    let test = parts.pop().unwrap();
    let val = parts.pop().unwrap();
    let train = parts.pop().unwrap();
    Ok(Splits { train, val, test })
}

pub fn load_splits(path: impl AsRef<Path>) -> Result<Splits> {
    let p = path.as_ref();
    parse_splits(&std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?)
}
