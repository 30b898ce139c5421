//! Sign pattern of `λ_k - d_k` once both sequences are inside their tails.

use std::cmp::Ordering;

use num_integer::Integer;

use crate::seqcore::{first_true, num::to_f64, power_range_sum, CertifiedValue, Side, TailSpec, Work, Q};

/// For `start <= k < k0` the difference `λ_k - d_k` is weakly of sign `before`;
/// for `k >= k0` it has sign `after` (strictly, unless `after` is `Equal`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regime {
    pub start: u64,
    pub k0: u64,
    pub before: Ordering,
    pub after: Ordering,
}

fn search_cap(work: &Work) -> u64 {
    work.n_work.saturating_mul(100)
}

/// Analyses the term-difference pattern of two nonincreasing sides.
/// `None` when the pair of tail families is not covered.
pub fn regime(l: &Side, d: &Side, work: &Work) -> Option<Regime> {
    let ll = l.prefix_len();
    let ld = d.prefix_len();
    let k = ll.max(ld) + 1;
    let constant = |s: Ordering| Some(Regime { start: k, k0: k, before: s, after: s });
    let crossing = |start: u64, target: Ordering| -> Option<Regime> {
        let k0 = first_true(start, search_cap(work), |n| l.term(n).cmp(&d.term(n)) == target)?;
        Some(Regime { start, k0, before: target.reverse(), after: target })
    };
    match (&l.tail, &d.tail) {
        (TailSpec::Zero, TailSpec::Zero) => constant(Ordering::Equal),
        (_, TailSpec::Zero) => constant(Ordering::Greater),
        (TailSpec::Zero, _) => constant(Ordering::Less),
        (TailSpec::Multi(_), _) | (_, TailSpec::Multi(_)) => None,
        (TailSpec::Geometric { first: a, ratio: r }, TailSpec::Geometric { first: b, ratio: q }) => {
            if r == q {
                // a r^(k-ll-1) vs b r^(k-ld-1)
                let lhs = a * crate::seqcore::num::pow(r, ld);
                let rhs = b * crate::seqcore::num::pow(r, ll);
                constant(lhs.cmp(&rhs))
            } else if r > q {
                crossing(k, Ordering::Greater)
            } else {
                crossing(k, Ordering::Less)
            }
        }
        (
            TailSpec::Power { coef: c1, exponent: s1, offset: o1 },
            TailSpec::Power { coef: c2, exponent: s2, offset: o2 },
        ) => {
            let e1 = *o1 as i128 - ll as i128;
            let e2 = *o2 as i128 - ld as i128;
            if s1 == s2 {
                if c1 == c2 {
                    constant(e2.cmp(&e1))
                } else {
                    crossing(k, c1.cmp(c2))
                }
            } else {
                let (s1, s2) = (*s1 as i128, *s2 as i128);
                // ratio of the dominant side is increasing once (s2-s1)k > s1 e2 - s2 e1
                let (num, den, target) = if s1 < s2 {
                    (s1 * e2 - s2 * e1, s2 - s1, Ordering::Greater)
                } else {
                    (s2 * e1 - s1 * e2, s1 - s2, Ordering::Less)
                };
                let km = Integer::div_floor(&num, &den) + 1;
                let start = (km.max(0) as u64).max(k);
                crossing(start, target)
            }
        }
        (TailSpec::Power { exponent, offset, .. }, TailSpec::Geometric { ratio, .. }) => {
            let e = *offset as f64 - ll as f64;
            let start = mono_start(*exponent, e, ratio).max(k);
            crossing(start, Ordering::Greater)
        }
        (TailSpec::Geometric { ratio, .. }, TailSpec::Power { exponent, offset, .. }) => {
            let e = *offset as f64 - ld as f64;
            let start = mono_start(*exponent, e, ratio).max(k);
            crossing(start, Ordering::Less)
        }
    }
}

/// Index from which `(k+e)^(-s) / q^k` is increasing: `k + e > s / ln(1/q)`.
fn mono_start(s: u32, e: f64, q: &Q) -> u64 {
    let lq = -to_f64(q).ln();
    let t = (s as f64 / lq - e).ceil() + 2.0;
    if t.is_finite() && t > 0.0 {
        t as u64
    } else {
        0
    }
}

/// `G_n = Σ_{i≤n} λ_i - Σ_{i≤n} d_i` from closed-form partial sums.
pub fn gap_at(l: &Side, d: &Side, n: u64, work: &Work) -> CertifiedValue {
    l.partial_sum(n, work) - d.partial_sum(n, work)
}

/// Coefficient sum of the harmonic (`s = 1`) components of a tail.
fn harmonic_mass(t: &TailSpec) -> Q {
    match t {
        TailSpec::Power { coef, exponent: 1, .. } => coef.clone(),
        TailSpec::Multi(cs) => cs.iter().map(harmonic_mass).sum(),
        _ => Q::from_integer(0.into()),
    }
}

/// `lim_n G_n`, which is also `liminf_n G_n` for the supported tail families.
pub fn gap_limit(l: &Side, d: &Side, work: &Work) -> CertifiedValue {
    match (l.is_summable(), d.is_summable()) {
        (true, true) => summable_difference(l, d, work),
        (false, true) => CertifiedValue::PlusInfinity,
        (true, false) => CertifiedValue::MinusInfinity,
        (false, false) => {
            let (ml, md) = (harmonic_mass(&l.tail), harmonic_mass(&d.tail));
            match ml.cmp(&md) {
                Ordering::Greater => CertifiedValue::PlusInfinity,
                Ordering::Less => CertifiedValue::MinusInfinity,
                Ordering::Equal => match (&l.tail, &d.tail) {
                    (
                        TailSpec::Power { coef, exponent: 1, offset: o1 },
                        TailSpec::Power { exponent: 1, offset: o2, .. },
                    ) => {
                        let ll = l.prefix_len();
                        let ld = d.prefix_len();
                        let k = ll.max(ld) + 1;
                        let head = gap_at(l, d, k - 1, work);
                        // Σ_{n≥k} c/(n+e1) - c/(n+e2) telescopes.
                        let x1 = (k as i128 + *o1 as i128 - ll as i128) as u64;
                        let x2 = (k as i128 + *o2 as i128 - ld as i128) as u64;
                        let tail = match x1.cmp(&x2) {
                            Ordering::Equal => CertifiedValue::zero(),
                            Ordering::Less => power_range_sum(coef, 1, x1, Some(x2 - 1), work),
                            Ordering::Greater => -power_range_sum(coef, 1, x2, Some(x1 - 1), work),
                        };
                        head + tail
                    }
                    _ => CertifiedValue::Unknown,
                },
            }
        }
    }
}

/// `Σλ - Σd` for summable sides, cancelling identical tail families exactly.
pub fn summable_difference(l: &Side, d: &Side, work: &Work) -> CertifiedValue {
    let head = CertifiedValue::Exact(l.prefix_sum() - d.prefix_sum());
    let tails = match (&l.tail, &d.tail) {
        (TailSpec::Power { coef: c1, exponent: s1, offset: o1 }, TailSpec::Power { coef: c2, exponent: s2, offset: o2 })
            if c1 == c2 && s1 == s2 =>
        {
            match o1.cmp(o2) {
                Ordering::Equal => CertifiedValue::zero(),
                Ordering::Less => power_range_sum(c1, *s1, o1 + 1, Some(*o2), work),
                Ordering::Greater => -power_range_sum(c1, *s1, o2 + 1, Some(*o1), work),
            }
        }
        (a, b) if a == b => CertifiedValue::zero(),
        (a, b) => a.total(work) - b.total(work),
    };
    head + tails
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::num::{q, qi};

    #[test]
    fn geometric_crossing() {
        let l = Side::new(vec![], TailSpec::geometric(qi(1), q(1, 2)));
        let d = Side::new(vec![], TailSpec::geometric(qi(8), q(1, 4)));
        let r = regime(&l, &d, &Work::default()).unwrap();
        // 2^(1-k) > 8 * 4^(1-k)  <=>  2^(k-1) > 8  <=>  k >= 5
        assert_eq!(r.k0, 5);
        assert_eq!(r.after, Ordering::Greater);
    }

    #[test]
    fn harmonic_telescoping_limit() {
        let w = Work::default();
        let l = Side::new(vec![], TailSpec::power(qi(1), 1, 0));
        let d = Side::new(vec![], TailSpec::power(qi(1), 1, 2));
        // Σ 1/k - 1/(k+2) = 1 + 1/2
        assert_eq!(gap_limit(&l, &d, &w), CertifiedValue::Exact(q(3, 2)));
        assert_eq!(gap_limit(&d, &l, &w), CertifiedValue::Exact(q(-3, 2)));
    }
}
