//! A real symmetric matrix with prescribed eigenvalues and diagonal, built
//! from rotations and checked by an independent Jacobi eigenvalue solver.

use std::error::Error;

use diagonals::construct::{schur_horn_build, verify_realization};
use diagonals::seqcore::num::{q, qi};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let lambda = [qi(4), qi(2), qi(1), qi(-1)];
    let d = [q(3, 2), qi(2), qi(1), q(3, 2)];
    let m = schur_horn_build(&lambda, &d)?;
    print!("{}", m.to_text());
    let r = verify_realization(&m, &lambda, &d, 1e-9)?;
    println!("eigenvalue residual {:.1e}, diagonal residual {:.1e}", r.eigen_residual, r.diagonal_residual);
    assert!(r.within(1e-9));

    // d = (5, 0, 0, 1) is not majorized by λ: no matrix exists
    assert!(schur_horn_build(&lambda, &[qi(5), qi(0), qi(0), qi(1)]).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
