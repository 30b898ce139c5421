use num_traits::{Signed, Zero};

use super::certified::CertifiedValue;
use super::extnat::ExtNat;
use super::num::Q;
use super::tail::{TailSpec, Work};

/// The nonzero terms of one sign class as magnitudes: a nonincreasing
/// positive prefix followed by a tail whose first term does not exceed the
/// last prefix entry.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Side {
    pub prefix: Vec<Q>,
    pub tail: TailSpec,
}

impl Side {
    pub fn new(prefix: Vec<Q>, tail: TailSpec) -> Side {
        let mut s = Side { prefix, tail: tail.canonical() };
        s.normalize();
        s
    }

    pub fn finite(prefix: Vec<Q>) -> Side {
        Side::new(prefix, TailSpec::Zero)
    }

    /// Sorts the prefix and absorbs tail terms exceeding its smallest entry.
    pub fn normalize(&mut self) {
        self.prefix.sort_by(|a, b| b.cmp(a));
        if let Some(min) = self.prefix.last().cloned() {
            let mut absorbed = Vec::new();
            while let Some(h) = self.tail.first() {
                if h > min {
                    absorbed.push(h);
                    self.tail = self.tail.shift(1);
                } else {
                    break;
                }
            }
            if !absorbed.is_empty() {
                self.prefix.extend(absorbed);
                self.prefix.sort_by(|a, b| b.cmp(a));
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.prefix.is_empty() && self.tail.is_zero()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> ExtNat {
        if self.tail.is_zero() {
            ExtNat::Fin(self.prefix.len() as u64)
        } else {
            ExtNat::Inf
        }
    }

    pub fn prefix_len(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn is_summable(&self) -> bool {
        self.tail.is_summable()
    }

    /// `k`-th largest term (1-based), zero beyond the nonzero terms.
    pub fn term(&self, k: u64) -> Q {
        let l = self.prefix_len();
        if k <= l {
            self.prefix[(k - 1) as usize].clone()
        } else if self.tail.is_zero() {
            Q::zero()
        } else {
            self.tail.term(k - l)
        }
    }

    /// Iterator over the nonzero terms in nonincreasing order.
    pub fn iter(&self) -> impl Iterator<Item = Q> + '_ {
        self.prefix.iter().cloned().chain(self.tail.iter())
    }

    /// First `n` nonzero terms (fewer when the side is finite).
    pub fn terms(&self, n: u64) -> Vec<Q> {
        self.iter().take(n as usize).collect()
    }

    /// Sum of the `n` largest terms.
    pub fn partial_sum(&self, n: u64, work: &Work) -> CertifiedValue {
        let l = self.prefix_len();
        let k = n.min(l);
        let head: Q = self.prefix[..k as usize].iter().sum();
        if n <= l {
            CertifiedValue::Exact(head)
        } else {
            CertifiedValue::Exact(head) + self.tail.partial_sum(n - l, work)
        }
    }

    pub fn total(&self, work: &Work) -> CertifiedValue {
        let head: Q = self.prefix.iter().sum();
        CertifiedValue::Exact(head) + self.tail.total(work)
    }

    pub fn prefix_sum(&self) -> Q {
        self.prefix.iter().sum()
    }

    /// Number of terms `>= alpha` for `alpha > 0`.
    pub fn count_ge(&self, alpha: &Q) -> u64 {
        debug_assert!(alpha.is_positive());
        let p = self.prefix.iter().filter(|x| *x >= alpha).count() as u64;
        p.saturating_add(self.tail.count_ge(alpha))
    }

    /// `sum_{x >= alpha} (x - alpha)`.
    pub fn excess_above(&self, alpha: &Q, work: &Work) -> CertifiedValue {
        let p: Q = self.prefix.iter().filter(|x| *x >= alpha).map(|x| x - alpha).sum();
        let k = self.tail.count_ge(alpha);
        if k == u64::MAX {
            return CertifiedValue::Unknown;
        }
        let t = self.tail.sum_ge(alpha, work);
        CertifiedValue::Exact(p) + t - CertifiedValue::Exact(alpha * Q::from_integer(k.into()))
    }

    /// Distinct prefix values followed by the first `k_tail` tail terms.
    pub fn knots(&self, k_tail: u64) -> Vec<Q> {
        let mut out: Vec<Q> = Vec::new();
        for x in self.prefix.iter().chain(self.tail.terms(k_tail).iter()) {
            if out.last() != Some(x) {
                out.push(x.clone());
            }
        }
        out
    }

    /// Terms of both sides merged (a multiset union).
    pub fn union(&self, other: &Side) -> Side {
        let mut prefix = self.prefix.clone();
        prefix.extend(other.prefix.iter().cloned());
        let tail = match (&self.tail, &other.tail) {
            (TailSpec::Zero, t) | (t, TailSpec::Zero) => t.clone(),
            (a, b) => {
                // Pull the terms of either tail that exceed the other's head into the prefix.
                let (mut a, mut b) = (a.clone(), b.clone());
                let bh = b.first().unwrap();
                let ah = a.first().unwrap();
                while let Some(h) = a.first() {
                    if h > bh {
                        prefix.push(h);
                        a = a.shift(1);
                    } else {
                        break;
                    }
                }
                while let Some(h) = b.first() {
                    if h > ah {
                        prefix.push(h);
                        b = b.shift(1);
                    } else {
                        break;
                    }
                }
                TailSpec::Multi(vec![a, b])
            }
        };
        Side::new(prefix, tail)
    }
}
