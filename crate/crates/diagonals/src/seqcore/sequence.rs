use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use super::certified::CertifiedValue;
use super::extnat::ExtNat;
use super::num::{fmt_q, parse_q, Q};
use super::side::Side;
use super::tail::{TailSpec, Work};
use super::SeqError;

/// A real sequence converging to zero: finitely many listed terms, a closed-form
/// tail for each sign and a (possibly infinite) number of zeros.
///
/// The stored form is always normalized; each sign class is kept as a [`Side`]
/// of magnitudes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedSequence {
    pos: Side,
    neg: Side,
    zeros: ExtNat,
}

impl ExtendedSequence {
    /// Builds and normalizes a sequence. Explicit zeros in `prefix` are rejected.
    pub fn new(prefix: Vec<Q>, pos_tail: TailSpec, neg_tail: TailSpec, zeros: ExtNat) -> Result<Self, SeqError> {
        if prefix.iter().any(|x| x.is_zero()) {
            return Err(SeqError::ZeroInPrefix);
        }
        pos_tail.validate()?;
        neg_tail.validate()?;
        let (p, n): (Vec<Q>, Vec<Q>) = prefix.into_iter().partition(|x| x.is_positive());
        Ok(ExtendedSequence::from_sides(
            Side::new(p, pos_tail),
            Side::new(n.into_iter().map(|x| -x).collect(), neg_tail),
            zeros,
        ))
    }

    /// Finitely many terms; zeros among them are moved into the zero count.
    pub fn from_terms(terms: &[Q]) -> Self {
        let nz: Vec<Q> = terms.iter().filter(|x| !x.is_zero()).cloned().collect();
        let zeros = (terms.len() - nz.len()) as u64;
        ExtendedSequence::new(nz, TailSpec::Zero, TailSpec::Zero, ExtNat::Fin(zeros)).unwrap()
    }

    /// Nonnegative sequence with a positive tail.
    pub fn positive(prefix: Vec<Q>, tail: TailSpec) -> Result<Self, SeqError> {
        ExtendedSequence::new(prefix, tail, TailSpec::Zero, ExtNat::ZERO)
    }

    pub fn from_sides(pos: Side, neg: Side, zeros: ExtNat) -> Self {
        let mut pos = pos;
        let mut neg = neg;
        pos.normalize();
        neg.normalize();
        absorb_across(&mut pos, &mut neg);
        ExtendedSequence { pos, neg, zeros }
    }

    pub fn with_zeros(mut self, zeros: ExtNat) -> Self {
        self.zeros = zeros;
        self
    }

    pub fn with_neg_tail(self, tail: TailSpec) -> Result<Self, SeqError> {
        tail.validate()?;
        let neg = Side::new(self.neg.prefix.clone(), tail);
        Ok(ExtendedSequence { neg, ..self })
    }

    pub fn pos(&self) -> &Side {
        &self.pos
    }

    pub fn neg(&self) -> &Side {
        &self.neg
    }

    pub fn zeros(&self) -> ExtNat {
        self.zeros
    }

    pub fn pos_tail(&self) -> &TailSpec {
        &self.pos.tail
    }

    pub fn neg_tail(&self) -> &TailSpec {
        &self.neg.tail
    }

    /// Listed terms: positives nonincreasing, then negatives nondecreasing.
    pub fn prefix(&self) -> Vec<Q> {
        let mut v = self.pos.prefix.clone();
        v.extend(self.neg.prefix.iter().map(|x| -x));
        v
    }

    /// `-s`.
    pub fn negated(&self) -> Self {
        ExtendedSequence::from_sides(self.neg.clone(), self.pos.clone(), self.zeros)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.neg.is_empty()
    }

    pub fn count_pos(&self) -> ExtNat {
        self.pos.len()
    }

    pub fn count_neg(&self) -> ExtNat {
        self.neg.len()
    }

    /// `#{i : s_i >= 0}`.
    pub fn count_nonneg(&self) -> ExtNat {
        self.pos.len() + self.zeros
    }

    /// `#{i : s_i <= 0}`.
    pub fn count_nonpos(&self) -> ExtNat {
        self.neg.len() + self.zeros
    }

    /// Total number of terms.
    pub fn len(&self) -> ExtNat {
        self.pos.len() + self.neg.len() + self.zeros
    }

    pub fn is_empty(&self) -> bool {
        self.len() == ExtNat::ZERO
    }

    /// `max(s_i, 0)`: negatives become zeros.
    pub fn positive_part(&self) -> Self {
        ExtendedSequence { pos: self.pos.clone(), neg: Side::default(), zeros: self.zeros + self.neg.len() }
    }

    /// `max(-s_i, 0)`.
    pub fn negative_part(&self) -> Self {
        self.negated().positive_part()
    }

    /// First `n` terms in enumeration order: decreasing absolute value,
    /// positive before negative on ties, zeros last.
    pub fn terms(&self, n: u64) -> Vec<Q> {
        let mut out = Vec::new();
        let mut pi = self.pos.iter().peekable();
        let mut ni = self.neg.iter().peekable();
        while (out.len() as u64) < n {
            let take_pos = match (pi.peek(), ni.peek()) {
                (Some(a), Some(b)) => a >= b,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_pos {
                out.push(pi.next().unwrap());
            } else {
                out.push(-ni.next().unwrap());
            }
        }
        let mut z = 0u64;
        while (out.len() as u64) < n && ExtNat::Fin(z) < self.zeros {
            out.push(Q::zero());
            z += 1;
        }
        out
    }

    /// Serializes to the JSON sequence format.
    pub fn to_json(&self) -> Value {
        json!({
            "prefix": self.prefix().iter().map(fmt_q).collect::<Vec<_>>(),
            "pos_tail": tail_to_json(&self.pos.tail),
            "neg_tail": tail_to_json(&self.neg.tail),
            "zeros": self.zeros.to_json(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, SeqError> {
        let obj = v.as_object().ok_or_else(|| SeqError::Json("sequence must be an object".into()))?;
        let prefix = match obj.get("prefix") {
            None => vec![],
            Some(Value::Array(items)) => items.iter().map(json_q).collect::<Result<Vec<_>, _>>()?,
            Some(_) => return Err(SeqError::Json("prefix must be an array".into())),
        };
        let mut zeros = match obj.get("zeros") {
            None => ExtNat::ZERO,
            Some(z) => ExtNat::from_json(z).ok_or_else(|| SeqError::Json(format!("bad zeros value {z}")))?,
        };
        let (pos_tail, pz) = tail_from_json(obj.get("pos_tail"))?;
        let (neg_tail, nz) = tail_from_json(obj.get("neg_tail"))?;
        zeros = zeros + pz + nz;
        // Zeros listed in the prefix are accepted in JSON and counted.
        let nonzero: Vec<Q> = prefix.iter().filter(|x| !x.is_zero()).cloned().collect();
        zeros = zeros + ExtNat::Fin((prefix.len() - nonzero.len()) as u64);
        ExtendedSequence::new(nonzero, pos_tail, neg_tail, zeros)
    }
}

/// Moves into the prefix every tail term that precedes the last listed term in
/// enumeration order (ties: positive before negative, listed before tail).
fn absorb_across(pos: &mut Side, neg: &mut Side) {
    let pm = pos.prefix.last().cloned();
    let nm = neg.prefix.last().cloned();
    let (m, last_negative) = match (pm, nm) {
        (None, None) => return,
        (Some(a), None) => (a, false),
        (None, Some(b)) => (b, true),
        (Some(a), Some(b)) => {
            if b <= a {
                (b, true)
            } else {
                (a, false)
            }
        }
    };
    let mut moved = false;
    while let Some(h) = pos.tail.first() {
        if h > m || (h == m && last_negative) {
            pos.prefix.push(h);
            pos.tail = pos.tail.shift(1);
            moved = true;
        } else {
            break;
        }
    }
    while let Some(h) = neg.tail.first() {
        if h > m {
            neg.prefix.push(h);
            neg.tail = neg.tail.shift(1);
            moved = true;
        } else {
            break;
        }
    }
    if moved {
        pos.prefix.sort_by(|a, b| b.cmp(a));
        neg.prefix.sort_by(|a, b| b.cmp(a));
    }
}

fn json_q(v: &Value) -> Result<Q, SeqError> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Q::from_integer(i.into()))
            } else {
                parse_q(&n.to_string())
            }
        }
        _ => Err(SeqError::Json(format!("expected rational, found {v}"))),
    }
}

pub fn tail_to_json(t: &TailSpec) -> Value {
    match t {
        TailSpec::Zero => json!({"kind": "zero"}),
        TailSpec::Geometric { first, ratio } => json!({"kind": "geometric", "first": fmt_q(first), "ratio": fmt_q(ratio)}),
        TailSpec::Power { coef, exponent, offset } => {
            json!({"kind": "power", "coef": fmt_q(coef), "exponent": exponent, "offset": offset})
        }
        TailSpec::Multi(cs) => json!({"kind": "multi", "components": cs.iter().map(tail_to_json).collect::<Vec<_>>()}),
    }
}

/// Parses a tail; a zero tail may carry a `count` that is returned separately.
pub fn tail_from_json(v: Option<&Value>) -> Result<(TailSpec, ExtNat), SeqError> {
    let Some(v) = v else { return Ok((TailSpec::Zero, ExtNat::ZERO)) };
    if v.is_null() {
        return Ok((TailSpec::Zero, ExtNat::ZERO));
    }
    let obj = v.as_object().ok_or_else(|| SeqError::Json("tail must be an object".into()))?;
    let kind = obj.get("kind").and_then(Value::as_str).ok_or_else(|| SeqError::Json("tail needs a kind".into()))?;
    let field = |name: &str| obj.get(name).ok_or_else(|| SeqError::Json(format!("{kind} tail needs `{name}`")));
    let t = match kind {
        "zero" => {
            let count = match obj.get("count") {
                None => ExtNat::ZERO,
                Some(c) => ExtNat::from_json(c).ok_or_else(|| SeqError::Json("bad zero count".into()))?,
            };
            return Ok((TailSpec::Zero, count));
        }
        "geometric" => TailSpec::Geometric { first: json_q(field("first")?)?, ratio: json_q(field("ratio")?)? },
        "power" => {
            let e = json_q(field("exponent")?)?;
            if !e.is_integer() || !e.is_positive() {
                return Err(SeqError::BadTail("power exponent must be a positive integer".into()));
            }
            let exponent = super::tail::floor_u64(&e).min(u32::MAX as u64) as u32;
            let offset = match obj.get("offset") {
                None => 0,
                Some(o) => o.as_u64().ok_or_else(|| SeqError::Json("offset must be a natural number".into()))?,
            };
            TailSpec::Power { coef: json_q(field("coef")?)?, exponent, offset }
        }
        "multi" => {
            let comps = field("components")?
                .as_array()
                .ok_or_else(|| SeqError::Json("components must be an array".into()))?;
            let mut cs = Vec::new();
            for c in comps {
                cs.push(tail_from_json(Some(c))?.0);
            }
            TailSpec::Multi(cs)
        }
        other => return Err(SeqError::Json(format!("unknown tail kind `{other}`"))),
    };
    t.validate()?;
    Ok((t.canonical(), ExtNat::ZERO))
}

// ---------------------------------------------------------------------------
// Free-function API

/// Returns the normalized form (sequences are stored normalized, so this
/// re-runs the normalization and is idempotent).
pub fn normalize(s: &ExtendedSequence) -> ExtendedSequence {
    ExtendedSequence::from_sides(s.pos.clone(), s.neg.clone(), s.zeros)
}

pub fn positive_part(s: &ExtendedSequence) -> ExtendedSequence {
    s.positive_part()
}

pub fn negative_part(s: &ExtendedSequence) -> ExtendedSequence {
    s.negative_part()
}

/// Decreasing rearrangement of a nonnegative sequence.
pub fn decreasing_rearrangement(s: &ExtendedSequence) -> Result<ExtendedSequence, SeqError> {
    if !s.is_nonnegative() {
        return Err(SeqError::Negative);
    }
    Ok(normalize(s))
}

/// Sum of the `n` largest terms of a nonnegative sequence.
pub fn partial_sum(s: &ExtendedSequence, n: u64, work: &Work) -> CertifiedValue {
    s.pos.partial_sum(n, work)
}

/// Sum of all terms of a nonnegative sequence.
pub fn total_sum(s: &ExtendedSequence, work: &Work) -> CertifiedValue {
    s.pos.total(work)
}

/// Multiset union.
pub fn concat(a: &ExtendedSequence, b: &ExtendedSequence) -> ExtendedSequence {
    ExtendedSequence { pos: a.pos.union(&b.pos), neg: a.neg.union(&b.neg), zeros: a.zeros + b.zeros }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::num::{q, qi};

    fn geo(a: Q, r: Q) -> TailSpec {
        TailSpec::geometric(a, r)
    }

    #[test]
    fn normalize_examples() {
        let s = ExtendedSequence::positive(vec![q(1, 4), qi(1)], geo(q(1, 2), q(1, 2))).unwrap();
        assert_eq!(s.prefix(), vec![qi(1), q(1, 2), q(1, 4)]);
        assert_eq!(s.pos_tail(), &geo(q(1, 4), q(1, 2)));

        let z = ExtendedSequence::new(vec![], TailSpec::Zero, TailSpec::Zero, ExtNat::Inf).unwrap();
        assert_eq!(normalize(&z), z);

        let s = ExtendedSequence::new(vec![qi(-1), qi(3)], geo(qi(1), q(1, 2)), TailSpec::Zero, ExtNat::ZERO).unwrap();
        assert_eq!(s.prefix(), vec![qi(3), qi(1), qi(-1)]);
        assert_eq!(s.pos_tail(), &geo(q(1, 2), q(1, 2)));
        assert_eq!(normalize(&s), s);

        assert!(ExtendedSequence::new(vec![qi(0)], TailSpec::Zero, TailSpec::Zero, ExtNat::ZERO).is_err());
    }

    #[test]
    fn parts_examples() {
        let s = ExtendedSequence::from_terms(&[qi(2), qi(-3)]);
        let p = s.positive_part();
        assert_eq!(p.prefix(), vec![qi(2)]);
        assert_eq!(p.zeros(), ExtNat::Fin(1));

        let s = ExtendedSequence::from_terms(&[qi(-2), qi(-3), q(-1, 2)]);
        let p = s.positive_part();
        assert!(p.prefix().is_empty());
        assert_eq!(p.zeros(), ExtNat::Fin(3));

        let s = ExtendedSequence::new(vec![qi(1), qi(-1)], geo(q(1, 2), q(1, 2)), geo(q(1, 2), q(1, 2)), ExtNat::ZERO).unwrap();
        let p = s.positive_part();
        assert_eq!(p.prefix(), vec![qi(1)]);
        assert_eq!(p.pos_tail(), &geo(q(1, 2), q(1, 2)));
        assert_eq!(p.zeros(), ExtNat::Inf);
        assert_eq!(s.negative_part(), p);
    }

    #[test]
    fn rearrangement_examples() {
        let s = ExtendedSequence::from_terms(&[q(1, 4), qi(1), q(1, 2)]);
        assert_eq!(decreasing_rearrangement(&s).unwrap().prefix(), vec![qi(1), q(1, 2), q(1, 4)]);
        let g = ExtendedSequence::positive(vec![], geo(qi(1), q(1, 2))).unwrap();
        assert_eq!(decreasing_rearrangement(&g).unwrap(), g);
        let s = ExtendedSequence::positive(vec![q(3, 10)], geo(qi(1), q(1, 2))).unwrap();
        let r = decreasing_rearrangement(&s).unwrap();
        assert_eq!(r.prefix(), vec![qi(1), q(1, 2), q(3, 10)]);
        assert_eq!(r.pos_tail(), &geo(q(1, 4), q(1, 2)));
        assert!(decreasing_rearrangement(&ExtendedSequence::from_terms(&[qi(-1)])).is_err());
    }

    #[test]
    fn sum_examples() {
        let w = Work::default();
        let g = ExtendedSequence::positive(vec![], geo(qi(1), q(1, 2))).unwrap();
        assert_eq!(partial_sum(&g, 3, &w), CertifiedValue::Exact(q(7, 4)));
        assert_eq!(total_sum(&g, &w), CertifiedValue::Exact(qi(2)));
        let f = ExtendedSequence::from_terms(&[qi(1), q(1, 2)]).with_zeros(ExtNat::Inf);
        assert_eq!(partial_sum(&f, 10, &w), CertifiedValue::Exact(q(3, 2)));
        let p = ExtendedSequence::positive(vec![], TailSpec::power(qi(1), 2, 0)).unwrap();
        assert_eq!(partial_sum(&p, 2, &w), CertifiedValue::Exact(q(5, 4)));
        let h = ExtendedSequence::positive(vec![], TailSpec::power(qi(1), 1, 0)).unwrap();
        assert_eq!(total_sum(&h, &w), CertifiedValue::PlusInfinity);
        let b = ExtendedSequence::positive(vec![qi(1)], TailSpec::power(qi(1), 2, 0)).unwrap();
        let (lo, hi) = total_sum(&b, &w).bounds().unwrap();
        let target = 1.0 + std::f64::consts::PI.powi(2) / 6.0;
        assert!(crate::seqcore::num::to_f64(&lo) <= target && crate::seqcore::num::to_f64(&hi) >= target - 1e-15);
        assert!(crate::seqcore::num::to_f64(&(hi - lo)) <= 1e-12);
    }

    #[test]
    fn concat_examples() {
        let a = ExtendedSequence::from_terms(&[qi(1)]);
        let b = ExtendedSequence::from_terms(&[]).with_zeros(ExtNat::Inf);
        let c = concat(&a, &b);
        assert_eq!(c.prefix(), vec![qi(1)]);
        assert_eq!(c.zeros(), ExtNat::Inf);

        let a = ExtendedSequence::positive(vec![], geo(qi(1), q(1, 2))).unwrap();
        let b = ExtendedSequence::positive(vec![], geo(q(1, 2), q(1, 2))).unwrap();
        let c = concat(&a, &b);
        assert_eq!(c.prefix(), vec![qi(1)]);
        assert_eq!(c.pos_tail(), &TailSpec::Multi(vec![geo(q(1, 2), q(1, 2)), geo(q(1, 2), q(1, 2))]));

        let a = ExtendedSequence::from_terms(&[qi(-1)]);
        let b = ExtendedSequence::from_terms(&[qi(2), qi(0)]);
        let c = concat(&a, &b);
        assert_eq!(c.prefix(), vec![qi(2), qi(-1)]);
        assert_eq!(c.zeros(), ExtNat::Fin(1));
    }

    #[test]
    fn enumeration_order_and_json() {
        let s = ExtendedSequence::new(vec![qi(1), qi(-1)], geo(q(1, 2), q(1, 2)), TailSpec::Zero, ExtNat::Fin(2)).unwrap();
        assert_eq!(s.terms(6), vec![qi(1), qi(-1), q(1, 2), q(1, 4), q(1, 8), q(1, 16)]);
        let f = ExtendedSequence::from_terms(&[qi(1), qi(0), qi(-1)]);
        assert_eq!(f.terms(5), vec![qi(1), qi(-1), qi(0)]);
        let j = s.to_json();
        assert_eq!(ExtendedSequence::from_json(&j).unwrap(), s);
        let parsed = ExtendedSequence::from_json(&serde_json::json!({
            "prefix": ["1", "-1/2"],
            "pos_tail": {"kind": "zero", "count": "inf"},
        }))
        .unwrap();
        assert_eq!(parsed.zeros(), ExtNat::Inf);
        assert!(ExtendedSequence::from_json(&serde_json::json!({
            "pos_tail": {"kind": "power", "coef": "1", "exponent": "1/2"}
        }))
        .is_err());
    }
}
