use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::locality::LocalityWeights;
use crate::rng::RngStream;

/// Outcome of a weighted draw.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Draw {
    pub ids: Vec<NodeId>,
    /// Every candidate had weight zero and the draw was uniform instead.
    pub fell_back: bool,
}

/// A candidate list with its resolved sampling distribution, reusable
/// across many draws.
#[derive(Clone, Debug)]
pub struct PreparedChoice {
    /// Candidates with positive weight (all candidates after fallback).
    support: Vec<NodeId>,
    /// Cumulative weights over `support`; `None` when the weights are equal.
    cumulative: Option<Vec<f64>>,
    weights: Vec<f64>,
    fell_back: bool,
}

impl PreparedChoice {
    pub fn new(candidates: &[NodeId], weights: &LocalityWeights) -> Result<Self> {
        let w: Vec<f64> = candidates.iter().map(|&c| weights.weight(c)).collect();
        Self::from_weights(candidates, &w)
    }

    /// `weights[i]` belongs to `candidates[i]`.
    pub(crate) fn from_weights(candidates: &[NodeId], weights: &[f64]) -> Result<Self> {
        if candidates.is_empty() {
            return Err(Error::invalid("weighted choice over no candidates"));
        }
        debug_assert_eq!(candidates.len(), weights.len());
        let mut support = Vec::with_capacity(candidates.len());
        let mut kept = Vec::with_capacity(candidates.len());
        for (&c, &w) in candidates.iter().zip(weights) {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::invalid(format!("weight {w} for node {c} is not a finite non-negative number")));
            }
            if w > 0.0 {
                support.push(c);
                kept.push(w);
            }
        }
        let fell_back = support.is_empty();
        if fell_back {
            support = candidates.to_vec();
            kept = vec![1.0; candidates.len()];
        }
        let uniform = kept.iter().all(|&w| w == kept[0]);
        let cumulative = (!uniform).then(|| {
            let mut acc = 0.0;
            kept.iter()
                .map(|&w| {
                    acc += w;
                    acc
                })
                .collect()
        });
        Ok(Self {
            support,
            cumulative,
            weights: kept,
            fell_back,
        })
    }

    /// Number of nodes that can be drawn.
    pub fn support_len(&self) -> usize {
        self.support.len()
    }

    pub fn fell_back(&self) -> bool {
        self.fell_back
    }

    /// Probability of each support node, in support order.
    pub fn probabilities(&self) -> Vec<(NodeId, f64)> {
        let total: f64 = self.weights.iter().sum();
        self.support
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| (v, w / total))
            .collect()
    }

    pub fn draw(&self, k: usize, replace: bool, rng: &mut RngStream) -> Result<Vec<NodeId>> {
        if k == 0 {
            return Err(Error::invalid("must draw at least one node"));
        }
        let m = self.support.len();
        if !replace && k > m {
            return Err(Error::invalid(format!(
                "cannot draw {k} distinct nodes from {m} eligible candidates"
            )));
        }
        Ok(match (&self.cumulative, replace) {
            (None, true) => (0..k).map(|_| self.support[rng.random_range(0..m)]).collect(),
            (None, false) => index::sample(rng, m, k)
                .into_iter()
                .map(|i| self.support[i])
                .collect(),
            (Some(cum), true) => {
                let total = cum[m - 1];
                (0..k)
                    .map(|_| {
                        let x = rng.random::<f64>() * total;
                        let i = cum.partition_point(|&c| c <= x).min(m - 1);
                        self.support[i]
                    })
                    .collect()
            }
            (Some(_), false) => {
                // Efraimidis-Spirakis: keep the k largest ln(u) / w
                let mut keyed: Vec<(f64, usize)> = self
                    .weights
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| {
                        let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                        (u.ln() / w, i)
                    })
                    .collect();
                keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
                keyed[..k].iter().map(|&(_, i)| self.support[i]).collect()
            }
        })
    }
}

/// Draws `k` candidates with probability proportional to their weights.
///
/// When every candidate weight is zero the draw is uniform over all
/// candidates and [`Draw::fell_back`] is set. Without replacement, `k` may
/// not exceed the number of positive-weight candidates (all candidates
/// after fallback).
pub fn weighted_choice(
    candidates: &[NodeId],
    weights: &LocalityWeights,
    k: usize,
    replace: bool,
    rng: &mut RngStream,
) -> Result<Draw> {
    let prepared = PreparedChoice::new(candidates, weights)?;
    Ok(Draw {
        ids: prepared.draw(k, replace, rng)?,
        fell_back: prepared.fell_back,
    })
}
