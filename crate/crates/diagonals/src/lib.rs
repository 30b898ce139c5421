//! Majorization analysis for eigenvalue lists of compact self-adjoint
//! operators, a decision procedure for which sequences occur as diagonals,
//! and finite-dimensional constructions that realize them.

pub mod seqcore;
pub mod majorization;
pub mod decision;
pub mod construct;
pub mod cli;
