//! Deciding whether a sequence is a diagonal of a compact self-adjoint
//! operator with a given eigenvalue list.
//!
//! ```text
//! cargo run --example decide
//! ```

use std::error::Error;

use diagonals::decision::{decide, Outcome};
use diagonals::seqcore::num::{q, qi};
use diagonals::seqcore::{ExtNat, ExtendedSequence, TailSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let halves = TailSpec::geometric(q(1, 2), q(1, 2));

    // eigenvalues -1, 1, 1/2, 1/4, ... against the diagonal 0, 0, 1/2, 1/4, ...
    let lambda = ExtendedSequence::new(vec![qi(-1)], TailSpec::geometric(qi(1), q(1, 2)), TailSpec::Zero, ExtNat::ZERO)?;
    let d = ExtendedSequence::new(vec![], halves.clone(), TailSpec::Zero, ExtNat::Fin(2))?;
    let v = decide(&lambda, &d);
    println!("{}", v.to_text());
    assert_eq!(v.outcome, Outcome::Diagonal);

    // a positive operator with one-dimensional kernel cannot hide the kernel
    // when the diagonal is the eigenvalue list itself
    let lambda = ExtendedSequence::positive(vec![], TailSpec::geometric(qi(1), q(1, 2)))?.with_zeros(ExtNat::Fin(1));
    let d = ExtendedSequence::positive(vec![], TailSpec::geometric(qi(1), q(1, 2)))?;
    let v = decide(&lambda, &d);
    println!("{}", v.to_text());
    assert_eq!(v.outcome, Outcome::NotDiagonal);
    println!("exit code would be {}", v.outcome.exit_code());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
