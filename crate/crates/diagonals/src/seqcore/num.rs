//! Rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::SeqError;

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qu(n: u64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `x^k` for a nonnegative exponent.
pub fn pow(x: &Q, k: u64) -> Q {
    if k == 0 {
        return Q::one();
    }
    let mut base = x.clone();
    let mut acc = Q::one();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

pub fn to_f64(x: &Q) -> f64 {
    match x.to_f64() {
        Some(v) => v,
        None => {
            // Very large numerators and denominators; scale through bit lengths.
            let n = x.numer();
            let d = x.denom();
            let shift = (n.bits() as i64).max(d.bits() as i64) - 900;
            let (n2, d2) = if shift > 0 {
                (n >> (shift as usize), d >> (shift as usize))
            } else {
                (n.clone(), d.clone())
            };
            let nf = n2.to_f64().unwrap_or(0.0);
            let df = d2.to_f64().unwrap_or(f64::INFINITY);
            nf / df
        }
    }
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

pub fn floor(x: &Q) -> BigInt {
    x.numer().div_floor(x.denom())
}

pub fn min_q(a: &Q, b: &Q) -> Q {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn max_q(a: &Q, b: &Q) -> Q {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Formats as `p` or `p/q`.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p`, `p/q` or a plain decimal such as `-0.375`.
pub fn parse_q(s: &str) -> Result<Q, SeqError> {
    let t = s.trim();
    let bad = || SeqError::BadRational(s.to_string());
    if let Some((a, b)) = t.split_once('/') {
        let n: BigInt = a.trim().parse().map_err(|_| bad())?;
        let d: BigInt = b.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        if !fp.chars().all(|c| c.is_ascii_digit()) || fp.is_empty() {
            return Err(bad());
        }
        let whole: BigInt = if ip.is_empty() { BigInt::zero() } else { ip.parse().map_err(|_| bad())? };
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let v = Q::new(whole * &scale + frac, scale);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// Widens a float enclosure into a rational interval that contains the exact value,
/// assuming the float carries at most `ulps` units of relative error.
pub fn widen(x: f64, ulps: f64) -> (Q, Q) {
    let pad = x.abs() * ulps * f64::EPSILON + f64::MIN_POSITIVE;
    (from_f64(x - pad - pad * f64::EPSILON), from_f64(x + pad + pad * f64::EPSILON))
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}
