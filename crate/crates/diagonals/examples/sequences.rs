//! Extended sequences: finite prefix, closed-form tails, zero count, and
//! certified partial sums.

use std::error::Error;

use diagonals::seqcore::num::{q, qi};
use diagonals::seqcore::{partial_sum, total_sum, CertifiedValue, ExtNat, ExtendedSequence, TailSpec, Work};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let w = Work::default();
    // 3, 1, -2, then 1/2, 1/4, ... above zero and 1/n^2 below, plus a kernel
    let s = ExtendedSequence::new(
        vec![qi(3), qi(1), qi(-2)],
        TailSpec::geometric(q(1, 2), q(1, 2)),
        TailSpec::power(qi(1), 2, 0),
        ExtNat::Inf,
    )?;
    println!("positive part: {:?}", s.pos().terms(6).iter().map(|x| x.to_string()).collect::<Vec<_>>());
    println!("negative part: {:?}", s.neg().terms(6).iter().map(|x| x.to_string()).collect::<Vec<_>>());
    println!("zeros: {}", s.zeros());

    // geometric sums are exact, power sums come with an enclosure
    let p = partial_sum(&s.positive_part(), 5, &w);
    assert_eq!(p, CertifiedValue::Exact(qi(3) + qi(1) + q(1, 2) + q(1, 4) + q(1, 8)));
    println!("Σ of five largest positive terms = {p}");
    let t = total_sum(&s.negative_part(), &w);
    println!("Σ of the negative part = {t}  (2 + π²/6 ≈ {:.6})", 2.0 + std::f64::consts::PI.powi(2) / 6.0);

    let json = s.to_json();
    let back = ExtendedSequence::from_json(&json)?;
    assert_eq!(back, s);
    println!("{}", serde_json::to_string(&json)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
