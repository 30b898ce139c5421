//! The kernel test for positive operators with a finite-dimensional kernel:
//! a definite yes, a definite no with an ε witness, and an instance between
//! the necessary and the sufficient condition.

use std::error::Error;

use diagonals::decision::{brute_force_kernel_window, kernel_gap_instance, kernel_test, KernelResult};
use diagonals::seqcore::num::{pow, q, qi};
use diagonals::seqcore::{ExtNat, ExtendedSequence, TailSpec, Work};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let w = Work::default();
    let lambda = ExtendedSequence::positive(vec![], TailSpec::geometric(qi(1), q(1, 2)))?;
    let d = ExtendedSequence::positive(vec![q(3, 4), q(3, 4)], TailSpec::geometric(q(1, 4), q(1, 2)))?;
    let yes = kernel_test(&lambda, &d, &w);
    println!("trivial kernel: {}", serde_json::to_string(&yes.to_json())?);
    assert_eq!(yes, KernelResult::Yes);

    let with_kernel = lambda.clone().with_zeros(ExtNat::Fin(1));
    let no = kernel_test(&with_kernel, &lambda, &w);
    println!("one zero eigenvalue, d = λ: {}", serde_json::to_string(&no.to_json())?);
    assert!(matches!(no, KernelResult::No(_)));

    let gap = pow(&q(1, 2), 20);
    let (gl, gd) = kernel_gap_instance(&gap);
    let (nec, suff_fails) = brute_force_kernel_window(&gl.pos().terms(2002), &gd.pos().terms(2002), 1, 2, 2000);
    println!("window n ≤ 2000: necessary holds {nec}, sufficient fails {suff_fails}");
    let r = kernel_test(&gl, &gd, &w);
    println!("gap instance: {}", serde_json::to_string(&r.to_json())?);
    assert!(matches!(r, KernelResult::Inconclusive(_)));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
