use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{DenseMatrix, SparseMatrix};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng::RngStream;

/// `D̃^{-1/2} (A + I) D̃^{-1/2}` in CSR form.
pub type NormalizedAdj = SparseMatrix;

/// Renormalized adjacency of an undirected graph. Every node gets a
/// self-loop, so isolated nodes map to 1 on the diagonal.
pub fn normalize_adj(g: &Graph) -> NormalizedAdj {
    let n = g.num_nodes();
    let d = |v: NodeId| (g.degree(v) + 1) as f64;
    let mut offsets = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(g.num_entries() + n);
    let mut values = Vec::with_capacity(g.num_entries() + n);
    offsets.push(0);
    for v in 0..n as NodeId {
        let row = g.neighbors(v);
        let split = row.partition_point(|&u| u < v);
        for &u in row[..split].iter().chain(std::iter::once(&v)).chain(&row[split..]) {
            indices.push(u);
            values.push(1.0 / (d(v) * d(u)).sqrt());
        }
        offsets.push(indices.len());
    }
    SparseMatrix::new(n, n, offsets, indices, values).expect("well-formed by construction")
}

/// Weights of the two-layer model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub w0: DenseMatrix,
    pub w1: DenseMatrix,
    pub seed: u64,
}

fn glorot(rows: usize, cols: usize, rng: &mut RngStream) -> DenseMatrix {
    let r = (6.0 / (rows + cols) as f64).sqrt();
    let data = (0..rows * cols).map(|_| rng.random_range(-r..=r)).collect();
    DenseMatrix::from_vec(rows, cols, data).expect("sized by construction")
}

impl ModelParams {
    /// Glorot-uniform initialisation.
    pub fn init(in_dim: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut rng = RngStream::for_component(seed, "model-init");
        Self {
            w0: glorot(in_dim, hidden, &mut rng),
            w1: glorot(hidden, classes, &mut rng),
            seed,
        }
    }

    pub fn from_weights(w0: DenseMatrix, w1: DenseMatrix) -> Result<Self> {
        if w0.cols() != w1.rows() {
            return Err(Error::Dimension(format!(
                "hidden widths differ: {} vs {}",
                w0.cols(),
                w1.rows()
            )));
        }
        Ok(Self { w0, w1, seed: 0 })
    }
}

/// Propagation matrices of the two layers. `inner` maps input rows to
/// hidden rows and `outer` maps hidden rows to output rows; on the full
/// graph both are the normalized adjacency.
#[derive(Clone, Copy, Debug)]
pub struct Propagation<'a> {
    pub inner: &'a SparseMatrix,
    pub outer: &'a SparseMatrix,
}

impl<'a> Propagation<'a> {
    pub fn full(adj: &'a NormalizedAdj) -> Self {
        Self { inner: adj, outer: adj }
    }
}

/// Intermediate values of one forward pass.
#[derive(Clone, Debug)]
pub struct Forward {
    /// inner · X
    pub ax: DenseMatrix,
    /// inner · X · W0, before the activation
    pub pre: DenseMatrix,
    /// outer · ReLU(pre)
    pub ah: DenseMatrix,
    pub logits: DenseMatrix,
}

pub fn forward(p: Propagation<'_>, x: &DenseMatrix, params: &ModelParams) -> Result<Forward> {
    if p.inner.rows() != p.outer.cols() {
        return Err(Error::Dimension(format!(
            "inner propagation has {} rows, outer expects {}",
            p.inner.rows(),
            p.outer.cols()
        )));
    }
    let ax = p.inner.matmul(x)?;
    let pre = ax.matmul(&params.w0)?;
    let mut hidden = pre.clone();
    hidden.data_mut().iter_mut().for_each(|h| *h = h.max(0.0));
    let ah = p.outer.matmul(&hidden)?;
    let logits = ah.matmul(&params.w1)?;
    Ok(Forward { ax, pre, ah, logits })
}

/// `Â · ReLU(Â X W0) · W1`
pub fn gcn_forward(adj: &NormalizedAdj, x: &DenseMatrix, params: &ModelParams) -> Result<DenseMatrix> {
    Ok(forward(Propagation::full(adj), x, params)?.logits)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub w0: DenseMatrix,
    pub w1: DenseMatrix,
}

fn check_targets(rows: usize, labels: &[u32], mask: &[bool], classes: usize) -> Result<usize> {
    if labels.len() != rows || mask.len() != rows {
        return Err(Error::Dimension(format!(
            "{rows} output rows, {} labels, {} mask entries",
            labels.len(),
            mask.len()
        )));
    }
    let m = mask.iter().filter(|&&b| b).count();
    if m == 0 {
        return Err(Error::invalid("loss mask selects no nodes"));
    }
    if let Some((_, &l)) = labels.iter().zip(mask).find(|(&l, &b)| b && l as usize >= classes) {
        return Err(Error::invalid(format!("label {l} out of range for {classes} classes")));
    }
    Ok(m)
}

/// Mean softmax cross-entropy over masked rows, and its gradient with
/// respect to the logits.
pub fn softmax_cross_entropy(logits: &DenseMatrix, labels: &[u32], mask: &[bool]) -> Result<(f64, DenseMatrix)> {
    let m = check_targets(logits.rows(), labels, mask, logits.cols())? as f64;
    let mut grad = DenseMatrix::zeros(logits.rows(), logits.cols());
    let mut loss = 0.0;
    for i in (0..logits.rows()).filter(|&i| mask[i]) {
        let z = logits.row(i);
        let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = z.iter().map(|&v| (v - max).exp()).sum();
        let y = labels[i] as usize;
        loss += sum.ln() + max - z[y];
        for (j, g) in grad.row_mut(i).iter_mut().enumerate() {
            let p = (z[j] - max).exp() / sum;
            *g = (p - f64::from(u8::from(j == y))) / m;
        }
    }
    Ok((loss / m, grad))
}

/// Loss and exact gradients of both weight matrices.
pub fn loss_and_grad(
    p: Propagation<'_>,
    x: &DenseMatrix,
    params: &ModelParams,
    labels: &[u32],
    mask: &[bool],
) -> Result<(f64, Gradients)> {
    let f = forward(p, x, params)?;
    let (loss, dz) = softmax_cross_entropy(&f.logits, labels, mask)?;
    let w1 = f.ah.t_matmul(&dz)?;
    let dah = dz.matmul_t(&params.w1)?;
    let mut dpre = p.outer.t_matmul(&dah)?;
    for (d, &z) in dpre.data_mut().iter_mut().zip(f.pre.data()) {
        if z <= 0.0 {
            *d = 0.0;
        }
    }
    let w0 = f.ax.t_matmul(&dpre)?;
    Ok((loss, Gradients { w0, w1 }))
}

/// Index of the largest logit in each row.
pub fn predict(logits: &DenseMatrix) -> Vec<u32> {
    (0..logits.rows())
        .map(|i| {
            let r = logits.row(i);
            (0..r.len()).fold(0, |best, j| if r[j] > r[best] { j } else { best }) as u32
        })
        .collect()
}

/// Share of `nodes` whose prediction matches its label; 0 for no nodes.
pub fn accuracy(logits: &DenseMatrix, labels: &[u32], nodes: &[NodeId]) -> f64 {
    if nodes.is_empty() {
        return 0.0;
    }
    let pred = predict(logits);
    let hits = nodes.iter().filter(|&&v| pred[v as usize] == labels[v as usize]).count();
    hits as f64 / nodes.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: f64) -> DenseMatrix {
        DenseMatrix::from_vec(1, 1, vec![x]).unwrap()
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_adj(&Graph::empty(1)).to_dense(), scalar(1.0));
        let edge = Graph::from_edges(2, &[(0, 1)], false).unwrap();
        assert_eq!(normalize_adj(&edge).to_dense().data(), &[0.5; 4]);
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)], false).unwrap();
        for &v in normalize_adj(&tri).to_dense().data() {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn forward_examples() {
        let iso = normalize_adj(&Graph::empty(1));
        let p = ModelParams::from_weights(scalar(1.0), scalar(1.0)).unwrap();
        assert_eq!(gcn_forward(&iso, &scalar(1.0), &p).unwrap(), scalar(1.0));
        let p = ModelParams::from_weights(scalar(1.0), scalar(5.0)).unwrap();
        assert_eq!(gcn_forward(&iso, &scalar(-1.0), &p).unwrap(), scalar(0.0));

        let edge = normalize_adj(&Graph::from_edges(2, &[(0, 1)], false).unwrap());
        let x = DenseMatrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap();
        let p = ModelParams::from_weights(scalar(1.0), scalar(1.0)).unwrap();
        let f = forward(Propagation::full(&edge), &x, &p).unwrap();
        assert_eq!(f.pre.data(), &[0.5, 0.5]);
        assert_eq!(f.logits.data(), &[0.5, 0.5]);
    }

    #[test]
    fn loss_examples() {
        let equal = DenseMatrix::zeros(2, 4);
        let (l, _) = softmax_cross_entropy(&equal, &[0, 3], &[true, true]).unwrap();
        assert!((l - 4f64.ln()).abs() < 1e-12);
        let confident = DenseMatrix::from_vec(1, 3, vec![5.0, 0.0, 0.0]).unwrap();
        let (l, _) = softmax_cross_entropy(&confident, &[0], &[true]).unwrap();
        assert!(l < 3f64.ln());
        assert!(softmax_cross_entropy(&equal, &[0, 0], &[false, false]).is_err());
        assert!(softmax_cross_entropy(&equal, &[0, 9], &[true, true]).is_err());
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = ModelParams::init(4, 8, 3, 1);
        assert_eq!(a, ModelParams::init(4, 8, 3, 1));
        assert_ne!(a.w0, ModelParams::init(4, 8, 3, 2).w0);
        let r = (6.0f64 / 12.0).sqrt();
        assert!(a.w0.data().iter().all(|w| w.abs() <= r));
    }

    #[test]
    fn accuracy_counts_hits() {
        let logits = DenseMatrix::from_vec(3, 2, vec![1.0, 0.0, 0.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(predict(&logits), vec![0, 1, 0]);
        assert!((accuracy(&logits, &[0, 0, 0], &[0, 1, 2]) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(accuracy(&logits, &[0, 0, 0], &[]), 0.0);
    }
}
