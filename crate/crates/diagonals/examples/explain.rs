//! Verdict together with the level function δ(α) and the partial-sum gaps.

use std::error::Error;

use diagonals::decision::explain;
use diagonals::seqcore::num::{q, qi};
use diagonals::seqcore::{ExtNat, ExtendedSequence, TailSpec};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // (1, 1, -1/2, -1/4, ...) against (1/2, 1/4, ...)
    let lambda = ExtendedSequence::new(vec![qi(1), qi(1)], TailSpec::Zero, TailSpec::geometric(q(1, 2), q(1, 2)), ExtNat::ZERO)?;
    let d = ExtendedSequence::positive(vec![], TailSpec::geometric(q(1, 2), q(1, 2)))?;
    let r = explain(&lambda, &d);
    print!("{}", r.to_text());
    assert!(!r.levels.is_empty());
    assert!(!r.gaps_plus.is_empty());
    let json = serde_json::to_string_pretty(&r.to_json())?;
    println!("{} bytes of JSON", json.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
