//! Sequence transformations that prepare eigenvalue lists for the
//! constructions, each with an exact post-condition check.

use std::error::Error;

use diagonals::construct::{convmove, convmove_holds, exequal_transform, fis_transform, fiz_transform, midseq_transform, one_neg_transform};
use diagonals::seqcore::num::{fmt_q, q, qi};
use diagonals::seqcore::{ExtNat, ExtendedSequence, Side, TailSpec, Q};

fn show(v: &[Q]) -> String {
    v.iter().take(8).map(fmt_q).collect::<Vec<_>>().join(", ")
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let geo = |a: Q, r: Q| Side::new(vec![], TailSpec::geometric(a, r));

    let out = convmove(&[qi(4), qi(2), qi(0)], &qi(1))?;
    println!("convex move: [{}]", show(&out));
    assert!(convmove_holds(&[qi(4), qi(2), qi(0)], &out));

    let l = Side::new(vec![qi(2)], TailSpec::geometric(q(1, 2), q(1, 2)));
    let d = Side::new(vec![q(1, 2)], TailSpec::geometric(q(1, 2), q(1, 2)));
    let p = midseq_transform(&l, &d, 8)?;
    p.verify()?;
    println!("intermediate sequence, excess {}: [{}]", fmt_q(&p.sigma), show(&p.lambda_tilde));

    let p = one_neg_transform(&geo(qi(1), q(1, 2)), &geo(q(1, 2), q(1, 2)), 6)?;
    p.verify()?;
    println!("one negative eigenvalue, n0 = {}: [{}]", p.n0, show(&p.lambda_tilde));

    let (l, d) = (geo(qi(1), q(1, 2)), geo(q(1, 2), q(1, 2)));
    let p = exequal_transform(&l, &l, &d, &d, 8)?;
    p.verify()?;
    println!("equal excesses: {} blocks", p.blocks.len());

    let l = Side::new(vec![qi(2), qi(1)], TailSpec::geometric(q(1, 2), q(1, 2)));
    let p = fis_transform(&l, &[qi(1)])?;
    p.verify()?;
    println!("finite head: [{}]", show(&p.lambda_tilde));

    let lam = ExtendedSequence::new(vec![qi(1)], TailSpec::geometric(q(1, 2), q(1, 2)), TailSpec::geometric(q(1, 4), q(1, 2)), ExtNat::ZERO)?;
    let p = fiz_transform(&lam, 2)?;
    p.verify(2)?;
    println!("collapsed term: {}", fmt_q(&p.lambda_tilde[(p.i0 - 1) as usize]));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
