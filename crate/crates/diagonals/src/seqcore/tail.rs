//! Closed-form tails: the infinitely many small terms of one sign class.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::certified::CertifiedValue;
use super::num::{from_f64, pow, q, qu, to_f64, Q};
use super::SeqError;

/// Tail of one sign class, stored as magnitudes.
///
/// Terms are indexed from `j = 1`:
/// geometric `first * ratio^(j-1)`, power `coef * (j + offset)^(-exponent)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum TailSpec {
    #[default]
    Zero,
    Geometric { first: Q, ratio: Q },
    Power { coef: Q, exponent: u32, offset: u64 },
    /// Union of several geometric/power components, enumerated by merging.
    Multi(Vec<TailSpec>),
}

/// Geometric partial sums beyond this many terms are enclosed rather than
/// computed exactly; the exact value would carry millions of bits.
pub const GEOMETRIC_EXACT_TERMS: u64 = 16_384;

/// Work configuration for certified sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Work {
    pub n_work: u64,
    pub k_tail: u64,
}

impl Default for Work {
    fn default() -> Self {
        Work::level(1)
    }
}

impl Work {
    /// Precision levels 1..=3.
    pub fn level(level: u8) -> Work {
        match level {
            0 | 1 => Work { n_work: 10_000, k_tail: 64 },
            2 => Work { n_work: 100_000, k_tail: 512 },
            _ => Work { n_work: 1_000_000, k_tail: 1 << 14 },
        }
    }

    /// Number of power-tail terms summed exactly before the Euler-Maclaurin part.
    pub fn exact_terms(&self) -> u64 {
        let lg = 64 - self.n_work.max(2).leading_zeros() as u64;
        16 + 2 * lg
    }

    /// Longest exact partial-sum scan the majorization checks attempt.
    pub fn scan_cap(&self) -> u64 {
        self.n_work
    }
}

impl TailSpec {
    pub fn geometric(first: Q, ratio: Q) -> TailSpec {
        TailSpec::Geometric { first, ratio }
    }

    pub fn power(coef: Q, exponent: u32, offset: u64) -> TailSpec {
        TailSpec::Power { coef, exponent, offset }
    }

    pub fn validate(&self) -> Result<(), SeqError> {
        match self {
            TailSpec::Zero => Ok(()),
            TailSpec::Geometric { first, ratio } => {
                if !first.is_positive() {
                    return Err(SeqError::BadTail("geometric first term must be > 0".into()));
                }
                if !ratio.is_positive() || *ratio >= Q::one() {
                    return Err(SeqError::BadTail("geometric ratio must lie in (0,1)".into()));
                }
                Ok(())
            }
            TailSpec::Power { coef, exponent, .. } => {
                if !coef.is_positive() {
                    return Err(SeqError::BadTail("power coefficient must be > 0".into()));
                }
                if *exponent == 0 {
                    return Err(SeqError::BadTail("power exponent must be a positive integer".into()));
                }
                Ok(())
            }
            TailSpec::Multi(cs) => {
                if cs.is_empty() {
                    return Err(SeqError::BadTail("multi tail needs components".into()));
                }
                for c in cs {
                    match c {
                        TailSpec::Geometric { .. } | TailSpec::Power { .. } => c.validate()?,
                        _ => return Err(SeqError::BadTail("multi components must be geometric or power".into())),
                    }
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, TailSpec::Zero)
    }

    /// Geometric tails and power tails with exponent > 1 are summable.
    pub fn is_summable(&self) -> bool {
        match self {
            TailSpec::Zero | TailSpec::Geometric { .. } => true,
            TailSpec::Power { exponent, .. } => *exponent > 1,
            TailSpec::Multi(cs) => cs.iter().all(|c| c.is_summable()),
        }
    }

    /// Flattens nested multis, drops zero components and sorts components canonically.
    pub fn canonical(self) -> TailSpec {
        match self {
            TailSpec::Multi(cs) => {
                let mut flat = Vec::new();
                for c in cs {
                    match c.canonical() {
                        TailSpec::Zero => {}
                        TailSpec::Multi(inner) => flat.extend(inner),
                        other => flat.push(other),
                    }
                }
                flat.sort_by(component_order);
                match flat.len() {
                    0 => TailSpec::Zero,
                    1 => flat.pop().unwrap(),
                    _ => TailSpec::Multi(flat),
                }
            }
            other => other,
        }
    }

    pub fn first(&self) -> Option<Q> {
        match self {
            TailSpec::Zero => None,
            TailSpec::Geometric { first, .. } => Some(first.clone()),
            TailSpec::Power { .. } => Some(self.term(1)),
            TailSpec::Multi(cs) => cs.iter().filter_map(|c| c.first()).max(),
        }
    }

    /// The `j`-th term (`j >= 1`).
    pub fn term(&self, j: u64) -> Q {
        assert!(j >= 1);
        match self {
            TailSpec::Zero => Q::zero(),
            TailSpec::Geometric { first, ratio } => first * pow(ratio, j - 1),
            TailSpec::Power { coef, exponent, offset } => {
                coef / pow(&qu(j + offset), *exponent as u64)
            }
            TailSpec::Multi(_) => self.iter().nth((j - 1) as usize).unwrap_or_else(Q::zero),
        }
    }

    /// Drops the first `k` terms.
    pub fn shift(&self, k: u64) -> TailSpec {
        if k == 0 {
            return self.clone();
        }
        match self {
            TailSpec::Zero => TailSpec::Zero,
            TailSpec::Geometric { first, ratio } => TailSpec::Geometric {
                first: first * pow(ratio, k),
                ratio: ratio.clone(),
            },
            TailSpec::Power { coef, exponent, offset } => TailSpec::Power {
                coef: coef.clone(),
                exponent: *exponent,
                offset: offset + k,
            },
            TailSpec::Multi(cs) => {
                let mut cs = cs.clone();
                for _ in 0..k {
                    let (idx, _) = head_index(&cs);
                    cs[idx] = cs[idx].shift(1);
                }
                TailSpec::Multi(cs)
            }
        }
    }

    /// Removes and returns the largest term.
    pub fn pop_head(&self) -> Option<(Q, TailSpec)> {
        let h = self.first()?;
        Some((h, self.shift(1)))
    }

    /// Terms in nonincreasing order.
    pub fn iter(&self) -> TailIter {
        TailIter::new(self)
    }

    pub fn terms(&self, n: u64) -> Vec<Q> {
        self.iter().take(n as usize).collect()
    }

    /// Number of terms `>= alpha` (saturating), for `alpha > 0`.
    pub fn count_ge(&self, alpha: &Q) -> u64 {
        assert!(alpha.is_positive());
        match self {
            TailSpec::Zero => 0,
            TailSpec::Geometric { first, ratio } => {
                if first < alpha {
                    return 0;
                }
                // largest j with first * r^(j-1) >= alpha
                let est = (to_f64(&(alpha / first)).ln() / to_f64(ratio).ln()).floor();
                let mut j = if est.is_finite() && est > 0.0 { est as u64 + 1 } else { 1 };
                j = j.max(1);
                while j > 1 && first * pow(ratio, j - 1) < *alpha {
                    j -= 1;
                }
                while first * pow(ratio, j) >= *alpha {
                    j += 1;
                }
                j
            }
            TailSpec::Power { coef, exponent, offset } => {
                // largest m with m^s <= coef/alpha; count = m - offset
                let bound = coef / alpha;
                let s = *exponent as u64;
                let est = to_f64(&bound).powf(1.0 / s as f64).floor();
                let mut m: u64 = if est.is_finite() && est >= 1.0 {
                    if est > 1.0e18 {
                        return u64::MAX;
                    }
                    est as u64
                } else {
                    0
                };
                while m > 0 && pow(&qu(m), s) > bound {
                    m -= 1;
                }
                while pow(&qu(m + 1), s) <= bound {
                    m += 1;
                }
                m.saturating_sub(*offset)
            }
            TailSpec::Multi(cs) => cs.iter().fold(0u64, |acc, c| acc.saturating_add(c.count_ge(alpha))),
        }
    }

    /// Number of terms `> alpha`.
    pub fn count_gt(&self, alpha: &Q) -> u64 {
        match self {
            TailSpec::Multi(cs) => cs.iter().fold(0u64, |acc, c| acc.saturating_add(c.count_gt(alpha))),
            _ => {
                let c = self.count_ge(alpha);
                if c > 0 && c != u64::MAX && self.term(c) == *alpha {
                    c - 1
                } else {
                    c
                }
            }
        }
    }

    /// Sum of the first `m` terms.
    pub fn partial_sum(&self, m: u64, work: &Work) -> CertifiedValue {
        if m == 0 {
            return CertifiedValue::zero();
        }
        match self {
            TailSpec::Zero => CertifiedValue::zero(),
            TailSpec::Geometric { first, ratio } if m <= GEOMETRIC_EXACT_TERMS => {
                CertifiedValue::Exact(first * (Q::one() - pow(ratio, m)) / (Q::one() - ratio))
            }
            TailSpec::Geometric { first, ratio } => {
                // the missing tail r^m first/(1-r) lies in [0, r^K first/(1-r)]
                let total = first / (Q::one() - ratio);
                let rest = &total * pow(ratio, GEOMETRIC_EXACT_TERMS);
                CertifiedValue::interval(&total - rest, total)
            }
            TailSpec::Power { coef, exponent, offset } => {
                power_range_sum(coef, *exponent, 1 + offset, Some(m + offset), work)
            }
            TailSpec::Multi(cs) => {
                // Count how many terms each component contributes among the first m.
                let mut counts = vec![0u64; cs.len()];
                let mut heap: BinaryHeap<Head> = cs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| Head { value: c.term(1), idx: i })
                    .collect();
                for _ in 0..m {
                    let h = heap.pop().unwrap();
                    counts[h.idx] += 1;
                    heap.push(Head { value: cs[h.idx].term(counts[h.idx] + 1), idx: h.idx });
                }
                cs.iter()
                    .zip(counts)
                    .fold(CertifiedValue::zero(), |acc, (c, k)| acc + c.partial_sum(k, work))
            }
        }
    }

    /// Sum of all terms.
    pub fn total(&self, work: &Work) -> CertifiedValue {
        match self {
            TailSpec::Zero => CertifiedValue::zero(),
            TailSpec::Geometric { first, ratio } => CertifiedValue::Exact(first / (Q::one() - ratio)),
            TailSpec::Power { coef, exponent, offset } => {
                power_range_sum(coef, *exponent, 1 + offset, None, work)
            }
            TailSpec::Multi(cs) => cs.iter().fold(CertifiedValue::zero(), |acc, c| acc + c.total(work)),
        }
    }

    /// Sum of the terms `>= alpha`.
    pub fn sum_ge(&self, alpha: &Q, work: &Work) -> CertifiedValue {
        match self {
            TailSpec::Multi(cs) => cs.iter().fold(CertifiedValue::zero(), |acc, c| acc + c.sum_ge(alpha, work)),
            _ => {
                let k = self.count_ge(alpha);
                if k == u64::MAX {
                    return CertifiedValue::Unknown;
                }
                self.partial_sum(k, work)
            }
        }
    }
}

fn component_order(a: &TailSpec, b: &TailSpec) -> Ordering {
    // Larger head first, then by a structural key.
    b.first().cmp(&a.first()).then_with(|| key(a).cmp(&key(b)))
}

fn key(t: &TailSpec) -> (u8, Q, Q, u64) {
    match t {
        TailSpec::Zero => (0, Q::zero(), Q::zero(), 0),
        TailSpec::Geometric { first, ratio } => (1, first.clone(), ratio.clone(), 0),
        TailSpec::Power { coef, exponent, offset } => (2, coef.clone(), qu(*exponent as u64), *offset),
        TailSpec::Multi(_) => (3, Q::zero(), Q::zero(), 0),
    }
}

fn head_index(cs: &[TailSpec]) -> (usize, Q) {
    let mut best = 0;
    let mut val = cs[0].first().unwrap_or_else(Q::zero);
    for (i, c) in cs.iter().enumerate().skip(1) {
        let f = c.first().unwrap_or_else(Q::zero);
        if f > val {
            best = i;
            val = f;
        }
    }
    (best, val)
}

#[derive(PartialEq, Eq)]
struct Head {
    value: Q,
    idx: usize,
}

impl Ord for Head {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value).then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Head {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Iterator over tail terms in nonincreasing order.
pub struct TailIter {
    parts: Vec<PartIter>,
    heap: BinaryHeap<Head>,
}

enum PartIter {
    Geo { next: Q, ratio: Q },
    Pow { coef: Q, s: u64, k: u64 },
}

impl PartIter {
    fn step(&mut self) -> Q {
        match self {
            PartIter::Geo { next, ratio } => {
                let v = next.clone();
                *next = &*next * &*ratio;
                v
            }
            PartIter::Pow { coef, s, k } => {
                let v = &*coef / pow(&qu(*k), *s);
                *k += 1;
                v
            }
        }
    }
}

impl TailIter {
    fn new(t: &TailSpec) -> TailIter {
        let comps: Vec<&TailSpec> = match t {
            TailSpec::Zero => vec![],
            TailSpec::Multi(cs) => cs.iter().collect(),
            other => vec![other],
        };
        let mut parts = Vec::new();
        let mut heap = BinaryHeap::new();
        for c in comps {
            let mut p = match c {
                TailSpec::Geometric { first, ratio } => PartIter::Geo { next: first.clone(), ratio: ratio.clone() },
                TailSpec::Power { coef, exponent, offset } => PartIter::Pow { coef: coef.clone(), s: *exponent as u64, k: offset + 1 },
                _ => continue,
            };
            let v = p.step();
            heap.push(Head { value: v, idx: parts.len() });
            parts.push(p);
        }
        TailIter { parts, heap }
    }
}

impl Iterator for TailIter {
    type Item = Q;
    fn next(&mut self) -> Option<Q> {
        let h = self.heap.pop()?;
        let v = self.parts[h.idx].step();
        self.heap.push(Head { value: v, idx: h.idx });
        Some(h.value)
    }
}

// ---------------------------------------------------------------------------
// Power sums

fn bernoulli_even(j: usize) -> Q {
    // B_2, B_4, B_6, B_8
    [q(1, 6), q(-1, 30), q(1, 42), q(-1, 30)][j - 1].clone()
}

fn factorial(n: u64) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * qu(k))
}

/// k-th derivative of `c x^(-s)` at `x`.
fn deriv(c: &Q, s: u64, k: u64, x: &Q) -> Q {
    let mut rising = Q::one();
    for i in 0..k {
        rising *= qu(s + i);
    }
    let sign = if k.is_multiple_of(2) { Q::one() } else { -Q::one() };
    sign * c * rising / pow(x, s + k)
}

/// Certified `sum_{x=a}^{b} c x^(-s)` with `a >= 1`; `b = None` means infinity.
pub fn power_range_sum(c: &Q, s: u32, a: u64, b: Option<u64>, work: &Work) -> CertifiedValue {
    assert!(a >= 1);
    let s = s as u64;
    if let Some(b) = b {
        if b < a {
            return CertifiedValue::zero();
        }
    }
    if b.is_none() && s <= 1 {
        return CertifiedValue::PlusInfinity;
    }
    let m = work.exact_terms();
    let exact_end = match b {
        Some(b) if b - a < m => b,
        _ => a + m - 1,
    };
    let mut exact = Q::zero();
    for x in a..=exact_end {
        exact += c / pow(&qu(x), s);
    }
    if Some(exact_end) == b {
        return CertifiedValue::Exact(exact);
    }
    let a2 = qu(exact_end + 1);
    let bq = b.map(qu);
    let f = |x: &Q| c / pow(x, s);

    // Integral part.
    let integral = if s >= 2 {
        let base = c / qu(s - 1);
        let hi_part = match &bq {
            Some(bv) => Q::one() / pow(bv, s - 1),
            None => Q::zero(),
        };
        CertifiedValue::Exact(base * (Q::one() / pow(&a2, s - 1) - hi_part))
    } else {
        let bv = bq.as_ref().unwrap();
        let ratio = to_f64(&(bv / &a2));
        let l = ratio.ln();
        // rounding the ratio costs about one ulp of 1 in the logarithm, even when l is small
        let pad = 8.0 * f64::EPSILON * (1.0 + l.abs());
        CertifiedValue::interval(c * from_f64(l - pad), c * from_f64(l + pad))
    };

    let fb = bq.as_ref().map(&f).unwrap_or_else(Q::zero);
    let mut corr = (f(&a2) + fb) / q(2, 1);
    let mut last = Q::zero();
    for j in 1..=4usize {
        let k = 2 * j as u64 - 1;
        let db = bq.as_ref().map(|bv| deriv(c, s, k, bv)).unwrap_or_else(Q::zero);
        let da = deriv(c, s, k, &a2);
        let t = bernoulli_even(j) / factorial(2 * j as u64) * (db - da);
        last = t.abs();
        corr += t;
    }
    let rem = last;
    CertifiedValue::Exact(exact + corr) + integral + CertifiedValue::interval(-rem.clone(), rem)
}

/// Smallest integer `k >= lo` with `pred(k)`, assuming `pred` is monotone
/// (false then true) on `[lo, cap]`. Returns `None` if it stays false up to `cap`.
pub fn first_true(lo: u64, cap: u64, mut pred: impl FnMut(u64) -> bool) -> Option<u64> {
    if lo > cap {
        return None;
    }
    if pred(lo) {
        return Some(lo);
    }
    let mut bad = lo;
    let mut step = 1u64;
    let good = loop {
        let probe = bad.saturating_add(step).min(cap);
        if pred(probe) {
            break probe;
        }
        if probe == cap {
            return None;
        }
        bad = probe;
        step = step.saturating_mul(2);
    };
    let (mut lo, mut hi) = (bad, good);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Exact `floor` of a positive rational as `u64`, saturating.
pub fn floor_u64(x: &Q) -> u64 {
    let f: BigInt = super::num::floor(x);
    if f.is_negative() {
        0
    } else {
        f.to_u64().unwrap_or(u64::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_partial_and_total() {
        let t = TailSpec::geometric(q(1, 1), q(1, 2));
        let w = Work::default();
        assert_eq!(t.partial_sum(3, &w), CertifiedValue::Exact(q(7, 4)));
        assert_eq!(t.total(&w), CertifiedValue::Exact(q(2, 1)));
        assert_eq!(t.count_ge(&q(1, 4)), 3);
        assert_eq!(t.count_gt(&q(1, 4)), 2);
    }

    #[test]
    fn power_counts() {
        let t = TailSpec::power(q(1, 1), 2, 0);
        assert_eq!(t.count_ge(&q(1, 4)), 2);
        assert_eq!(t.count_ge(&q(1, 5)), 2);
        assert_eq!(t.count_ge(&q(1, 9)), 3);
        assert_eq!(t.shift(2).count_ge(&q(1, 9)), 1);
    }

    #[test]
    fn basel_enclosure() {
        let t = TailSpec::power(q(1, 1), 2, 0);
        let v = t.total(&Work::default());
        let (lo, hi) = v.bounds().unwrap();
        let pi2 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(to_f64(&lo) <= pi2 + 1e-15 && to_f64(&hi) >= pi2 - 1e-15);
        assert!(to_f64(&(hi - lo)) < 1e-12);
    }

    #[test]
    fn harmonic_range_brackets_direct_sum() {
        let w = Work::default();
        let v = power_range_sum(&q(1, 1), 1, 1, Some(5000), &w);
        let direct: f64 = (1..=5000).map(|k| 1.0 / k as f64).sum();
        let (lo, hi) = v.bounds().unwrap();
        assert!(to_f64(&lo) <= direct + 1e-12 && to_f64(&hi) >= direct - 1e-12);
    }

    #[test]
    fn multi_iteration_merges() {
        let t = TailSpec::Multi(vec![
            TailSpec::geometric(q(1, 2), q(1, 2)),
            TailSpec::geometric(q(1, 3), q(1, 3)),
        ]);
        assert_eq!(t.terms(4), vec![q(1, 2), q(1, 3), q(1, 4), q(1, 8)]);
        assert_eq!(t.partial_sum(4, &Work::default()), CertifiedValue::Exact(q(29, 24)));
        assert_eq!(t.shift(2).first(), Some(q(1, 4)));
    }

    #[test]
    fn first_true_finds_threshold() {
        assert_eq!(first_true(1, 1000, |k| k >= 137), Some(137));
        assert_eq!(first_true(5, 10, |_| false), None);
    }
}
