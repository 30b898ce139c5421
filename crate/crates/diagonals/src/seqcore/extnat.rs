use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// A cardinality in `{0, 1, 2, ...} ∪ {∞}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtNat {
    Fin(u64),
    Inf,
}

impl ExtNat {
    pub const ZERO: ExtNat = ExtNat::Fin(0);

    pub fn is_inf(self) -> bool {
        matches!(self, ExtNat::Inf)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtNat::Fin(n) => Some(n),
            ExtNat::Inf => None,
        }
    }

    /// `self - other` when it is well defined and nonnegative.
    /// `∞ - k = ∞`; `∞ - ∞` is undefined.
    pub fn checked_sub(self, other: ExtNat) -> Option<ExtNat> {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.checked_sub(b).map(ExtNat::Fin),
            (ExtNat::Inf, ExtNat::Fin(_)) => Some(ExtNat::Inf),
            _ => None,
        }
    }
}

impl Add for ExtNat {
    type Output = ExtNat;
    fn add(self, rhs: ExtNat) -> ExtNat {
        match (self, rhs) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => ExtNat::Fin(a + b),
            _ => ExtNat::Inf,
        }
    }
}

impl PartialOrd for ExtNat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtNat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtNat::Fin(a), ExtNat::Fin(b)) => a.cmp(b),
            (ExtNat::Fin(_), ExtNat::Inf) => Ordering::Less,
            (ExtNat::Inf, ExtNat::Fin(_)) => Ordering::Greater,
            (ExtNat::Inf, ExtNat::Inf) => Ordering::Equal,
        }
    }
}

impl From<u64> for ExtNat {
    fn from(n: u64) -> Self {
        ExtNat::Fin(n)
    }
}

impl fmt::Display for ExtNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNat::Fin(n) => write!(f, "{n}"),
            ExtNat::Inf => write!(f, "inf"),
        }
    }
}

impl ExtNat {
    pub fn to_json(self) -> serde_json::Value {
        match self {
            ExtNat::Fin(n) => serde_json::Value::from(n),
            ExtNat::Inf => serde_json::Value::from("inf"),
        }
    }

    pub fn from_json(v: &serde_json::Value) -> Option<ExtNat> {
        match v {
            serde_json::Value::Number(n) => n.as_u64().map(ExtNat::Fin),
            serde_json::Value::String(s) if s == "inf" => Some(ExtNat::Inf),
            serde_json::Value::String(s) => s.parse::<u64>().ok().map(ExtNat::Fin),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        assert_eq!(ExtNat::Fin(2) + ExtNat::Fin(3), ExtNat::Fin(5));
        assert_eq!(ExtNat::Inf + ExtNat::Fin(3), ExtNat::Inf);
        assert_eq!(ExtNat::Fin(2).min(ExtNat::Inf), ExtNat::Fin(2));
        assert_eq!(ExtNat::Inf.checked_sub(ExtNat::Fin(4)), Some(ExtNat::Inf));
        assert_eq!(ExtNat::Fin(1).checked_sub(ExtNat::Fin(4)), None);
        assert_eq!(ExtNat::Inf.checked_sub(ExtNat::Inf), None);
        assert!(ExtNat::Fin(u64::MAX) < ExtNat::Inf);
    }
}
