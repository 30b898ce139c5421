//! Finite-dimensional realizations, two-dimensional moves, and exact
//! sequence transformers with checked post-conditions.

mod build;
mod matrix;
mod rotation;
mod transform;

pub use build::{chain_matrix, infmove_build, schur_horn_build, schur_horn_chain, tbound_build, BuildTrace};
pub use matrix::{block_diag, jacobi_eigenvalues, verify_realization, Mat, RealizationReport};
pub use rotation::{alpha_for, loglem_index, loss_chain, noloss_chain, offdiag_move, LossChain, Move, NolossChain, RotationChain};
pub use transform::{
    convmove, convmove_holds, exequal_transform, finite_majorized, fis_transform, fiz_transform, midseq_transform,
    one_neg_transform, ExequalBlock, ExequalPlan, FisPlan, FizPlan, MidseqCase, MidseqPlan, OneNegPlan, TransformPlan,
    WINDOW_CAP,
};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("equal diagonal entries {0} admit no move")]
    Degenerate(f64),
    #[error("target {target} not between {lo} and {hi}")]
    NotBracketed { target: f64, lo: f64, hi: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("majorization fails at partial sum {n}")]
    Majorization { n: u64 },
    #[error("traces differ: {lambda} vs {d}")]
    Trace { lambda: String, d: String },
    #[error("termwise dominance fails at index {index}")]
    Dominance { index: u64 },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("window of {0} terms exceeds the cap")]
    Window(u64),
}
