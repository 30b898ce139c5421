//! Truncated rotation chain for one negative eigenvalue against a positive
//! diagonal: the first N entries are exact and the leftover entry is the
//! term that vanishes as N grows.

use std::error::Error;

use diagonals::construct::{chain_matrix, tbound_build, verify_realization};
use diagonals::seqcore::num::{fmt_q, pow, q, qi};
use diagonals::seqcore::Q;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let n = 40;
    // λ = (-1; 1, 1/2, 1/4, ...), d = (1/2, 1/4, ...)
    let lambda: Vec<Q> = (0..n).map(|k| pow(&q(1, 2), k as u64)).collect();
    let d: Vec<Q> = (0..n).map(|k| pow(&q(1, 2), k as u64 + 1)).collect();
    let t = tbound_build(&lambda, &d, &qi(1), n)?;
    println!("diagonal error {:.1e}, trace drift {:.1e}", t.diagonal_error(), t.trace_drift);
    println!("leftover entry {}", fmt_q(&t.residual_exact));
    assert_eq!(t.residual_exact, -pow(&q(1, 2), n as u64));

    let mut spectrum = vec![qi(-1)];
    spectrum.extend(lambda.iter().cloned());
    let mut diag = d.clone();
    diag.push(t.residual_exact.clone());
    let m = chain_matrix(&t, &spectrum);
    let r = verify_realization(&m, &spectrum, &diag, 1e-9)?;
    println!("{}x{} matrix, residuals {:.1e} / {:.1e}", m.n, m.n, r.eigen_residual, r.diagonal_residual);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
