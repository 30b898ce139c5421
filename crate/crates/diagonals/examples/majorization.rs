//! Riemann and Lebesgue majorization, the level function δ(α), and the
//! positive and negative excess.

use std::error::Error;

use diagonals::majorization::{delta, excess, lebesgue_majorizes, lr_equivalence_check, riemann_majorizes};
use diagonals::seqcore::num::{q, qi};
use diagonals::seqcore::{ExtendedSequence, TailSpec, Work};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let w = Work::default();
    let lambda = ExtendedSequence::positive(vec![qi(2)], TailSpec::geometric(q(1, 2), q(1, 2)))?;
    let d = ExtendedSequence::positive(vec![], TailSpec::geometric(qi(1), q(1, 2)))?;

    let r = riemann_majorizes(&lambda, &d, w.n_work, &w);
    let l = lebesgue_majorizes(&lambda, &d, &w);
    println!("Riemann: {}, Lebesgue: {}", r.label(), l.label());
    assert_eq!(r.holds(), l.holds());

    for a in [qi(1), q(1, 2), q(1, 8)] {
        println!("δ({a}) = {}", delta(&a, &lambda, &d, &w)?);
    }
    let e = excess(&lambda, &d, &w);
    println!("σ+ = {}, σ- = {}", e.sigma_plus, e.sigma_minus);

    // the two notions on finitely supported data, exactly
    let rep = lr_equivalence_check(&[qi(3), qi(1), qi(1)], &[qi(2), qi(2), q(1, 2)]);
    println!("{rep:?}");
    assert!(rep.consistent());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
