//! Randomized property suites: Riemann/Lebesgue agreement, Schur–Horn round
//! trips, and transformer post-conditions.

use std::error::Error;

use diagonals::cli::oracle::{lr_suite, schur_horn_suite, transformer_suite, TRANSFORMERS};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let r = lr_suite(1, 100);
    print!("{}", r.to_text());
    let r2 = schur_horn_suite(1, 6, 20);
    print!("{}", r2.to_text());
    let mut ok = r.passed() && r2.passed();
    for name in TRANSFORMERS {
        let t = transformer_suite(1, name, 10);
        print!("{}", t.to_text());
        ok &= t.passed();
    }
    if ok {
        Ok(())
    } else {
        Err("a suite reported violations".into())
    }
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
