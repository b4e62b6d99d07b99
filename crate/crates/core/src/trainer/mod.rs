//! A two-layer GCN with hand-written gradients, trained on full graphs or
//! on sampler output.

mod data;
mod matrix;
mod model;
mod train;

pub use data::{
    load_dataset, load_splits, parse_dataset, parse_splits, planted_dataset, random_splits, write_dataset,
    write_splits, Dataset, Splits,
};
pub use matrix::{DenseMatrix, SparseMatrix};
pub use model::{
    accuracy, forward, gcn_forward, loss_and_grad, normalize_adj, predict, softmax_cross_entropy, Forward, Gradients,
    ModelParams, NormalizedAdj, Propagation,
};
pub use train::{block_matrix, train, EpochRecord, TrainOptions, TrainReport};
