use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{Signed, Zero};

use super::num::{fmt_q, max_q, min_q, Q};

/// A real number known either exactly, up to a rational enclosure, or as ±∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertifiedValue {
    Exact(Q),
    Interval { lo: Q, hi: Q },
    PlusInfinity,
    MinusInfinity,
    /// No enclosure is available (for instance a liminf of two interleaved
    /// nonsummable families with equal leading coefficients).
    Unknown,
}

use CertifiedValue::*;

impl CertifiedValue {
    pub fn zero() -> Self {
        Exact(Q::zero())
    }

    /// Builds an interval, collapsing it when the endpoints agree.
    pub fn interval(lo: Q, hi: Q) -> Self {
        debug_assert!(lo <= hi);
        if lo == hi {
            Exact(lo)
        } else {
            Interval { lo, hi }
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Exact(_))
    }

    pub fn exact(&self) -> Option<&Q> {
        match self {
            Exact(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Exact(_) | Interval { .. })
    }

    /// Lower and upper rational bounds of a finite value.
    pub fn bounds(&self) -> Option<(Q, Q)> {
        match self {
            Exact(v) => Some((v.clone(), v.clone())),
            Interval { lo, hi } => Some((lo.clone(), hi.clone())),
            _ => None,
        }
    }

    pub fn width(&self) -> Option<Q> {
        self.bounds().map(|(lo, hi)| hi - lo)
    }

    /// Certified sign, `None` when an interval straddles zero or the value is unknown.
    pub fn sign(&self) -> Option<Ordering> {
        match self {
            Exact(v) => Some(v.cmp(&Q::zero())),
            Interval { lo, hi } => {
                if lo.is_positive() {
                    Some(Ordering::Greater)
                } else if hi.is_negative() {
                    Some(Ordering::Less)
                } else if lo.is_zero() && hi.is_zero() {
                    Some(Ordering::Equal)
                } else {
                    None
                }
            }
            PlusInfinity => Some(Ordering::Greater),
            MinusInfinity => Some(Ordering::Less),
            Unknown => None,
        }
    }

    /// Certified comparison `self` vs `other`.
    pub fn compare(&self, other: &CertifiedValue) -> Option<Ordering> {
        match (self, other) {
            (PlusInfinity, PlusInfinity) | (MinusInfinity, MinusInfinity) => Some(Ordering::Equal),
            (Unknown, _) | (_, Unknown) => None,
            (PlusInfinity, _) | (_, MinusInfinity) => Some(Ordering::Greater),
            (MinusInfinity, _) | (_, PlusInfinity) => Some(Ordering::Less),
            _ => (self.clone() - other.clone()).sign(),
        }
    }

    /// `Some(true)` if certainly `self >= other`, `Some(false)` if certainly `<`.
    pub fn certainly_ge(&self, other: &CertifiedValue) -> Option<bool> {
        match (self, other) {
            (PlusInfinity, PlusInfinity) | (MinusInfinity, MinusInfinity) => Some(true),
            (Unknown, _) | (_, Unknown) => None,
            (PlusInfinity, _) | (_, MinusInfinity) => Some(true),
            (MinusInfinity, _) | (_, PlusInfinity) => Some(false),
            _ => {
                let (alo, ahi) = self.bounds().unwrap();
                let (blo, bhi) = other.bounds().unwrap();
                if alo >= bhi {
                    Some(true)
                } else if ahi < blo {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &CertifiedValue) -> Option<CertifiedValue> {
        match (self.bounds(), other.bounds()) {
            (Some((a, b)), Some((c, d))) => {
                let lo = max_q(&a, &c);
                let hi = min_q(&b, &d);
                if lo <= hi {
                    Some(CertifiedValue::interval(lo, hi))
                } else {
                    None
                }
            }
            _ => {
                if self == other || matches!(other, Unknown) {
                    Some(self.clone())
                } else if matches!(self, Unknown) {
                    Some(other.clone())
                } else {
                    None
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exact(v) => super::num::to_f64(v),
            Interval { lo, hi } => (super::num::to_f64(lo) + super::num::to_f64(hi)) / 2.0,
            PlusInfinity => f64::INFINITY,
            MinusInfinity => f64::NEG_INFINITY,
            Unknown => f64::NAN,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Exact(v) => fmt_q(v),
            Interval { lo, hi } => format!("[{}, {}]", fmt_q(lo), fmt_q(hi)),
            PlusInfinity => "inf".into(),
            MinusInfinity => "-inf".into(),
            Unknown => "unknown".into(),
        }
    }
}

impl fmt::Display for CertifiedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval { lo, hi } => write!(
                f,
                "[{:.15e}, {:.15e}]",
                super::num::to_f64(lo),
                super::num::to_f64(hi)
            ),
            other => f.write_str(&other.render()),
        }
    }
}

impl Add for CertifiedValue {
    type Output = CertifiedValue;
    fn add(self, rhs: CertifiedValue) -> CertifiedValue {
        match (self, rhs) {
            (Unknown, _) | (_, Unknown) => Unknown,
            (PlusInfinity, MinusInfinity) | (MinusInfinity, PlusInfinity) => Unknown,
            (PlusInfinity, _) | (_, PlusInfinity) => PlusInfinity,
            (MinusInfinity, _) | (_, MinusInfinity) => MinusInfinity,
            (Exact(a), Exact(b)) => Exact(a + b),
            (a, b) => {
                let (alo, ahi) = a.bounds().unwrap();
                let (blo, bhi) = b.bounds().unwrap();
                CertifiedValue::interval(alo + blo, ahi + bhi)
            }
        }
    }
}

impl Neg for CertifiedValue {
    type Output = CertifiedValue;
    fn neg(self) -> CertifiedValue {
        match self {
            Exact(v) => Exact(-v),
            Interval { lo, hi } => Interval { lo: -hi, hi: -lo },
            PlusInfinity => MinusInfinity,
            MinusInfinity => PlusInfinity,
            Unknown => Unknown,
        }
    }
}

impl Sub for CertifiedValue {
    type Output = CertifiedValue;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: CertifiedValue) -> CertifiedValue {
        self + (-rhs)
    }
}

impl From<Q> for CertifiedValue {
    fn from(v: Q) -> Self {
        Exact(v)
    }
}
