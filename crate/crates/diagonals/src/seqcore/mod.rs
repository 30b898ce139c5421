//! Exact sequences converging to zero and their certified partial sums.

mod certified;
mod extnat;
pub mod num;
mod sequence;
mod side;
mod tail;

pub use certified::CertifiedValue;
pub use extnat::ExtNat;
pub use num::Q;
pub use sequence::{
    concat, decreasing_rearrangement, negative_part, normalize, partial_sum, positive_part, tail_from_json,
    tail_to_json, total_sum, ExtendedSequence,
};
pub use side::Side;
pub use tail::{first_true, floor_u64, power_range_sum, TailIter, TailSpec, Work};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SeqError {
    #[error("prefix contains an explicit zero; use the zero count instead")]
    ZeroInPrefix,
    #[error("invalid tail: {0}")]
    BadTail(String),
    #[error("cannot parse rational `{0}`")]
    BadRational(String),
    #[error("sequence has negative terms")]
    Negative,
    #[error("json: {0}")]
    Json(String),
}
