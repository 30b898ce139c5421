//! One positive eigenvalue moved out against a summable list of negative
//! eigenvalues: the running entry settles just below `λ_1 - Σ λ₋ᵢ`.

use std::error::Error;

use diagonals::construct::infmove_build;
use diagonals::seqcore::num::{fmt_q, pow, q, qi, to_f64};
use diagonals::seqcore::Q;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let n = 30;
    let lambda1 = qi(2);
    let neg: Vec<Q> = (0..n).map(|k| pow(&q(1, 2), k as u64 + 1)).collect();
    let eps = q(1, 4);
    let t = infmove_build(&lambda1, &neg, &eps, n)?;
    let s: Q = neg.iter().sum();
    println!("λ1 - s = {}", fmt_q(&(&lambda1 - &s)));
    println!("running entry after {n} steps: {} ({:.6})", fmt_q(&t.residual_exact), to_f64(&t.residual_exact));
    assert!(t.residual_exact < &lambda1 - &s);
    assert!(t.residual_exact >= &lambda1 - &s - &eps);
    println!("first targets: {:?}", t.target.iter().take(4).map(fmt_q).collect::<Vec<_>>());
    println!("diagonal error {:.1e}", t.diagonal_error());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
