//! Diagonals of positive compact operators with a kernel: the necessary
//! ε-condition, the sufficient eventual-dominance condition, and the gap
//! between them.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::majorization::{gap_limit, riemann_sides, Status, Witness};
use crate::seqcore::num::{fmt_q, pow, q, qi, qu};
use crate::seqcore::{first_true, CertifiedValue, ExtNat, ExtendedSequence, Side, TailSpec, Work, Q};

/// Smallest ε tried when looking for a violation of the necessary condition.
pub const EPSILON_FAMILY_DEPTH: u32 = 16;
/// Largest `p` examined when the kernel is infinite-dimensional.
pub const P_MAX: u64 = 4096;

/// Why a kernel test answered "no".
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelWitness {
    /// Operator and diagonal live in spaces of different dimension.
    Dimension { lambda: ExtNat, d: ExtNat },
    /// Fewer zero eigenvalues than zero diagonal entries.
    Kernel { lambda_zeros: ExtNat, d_zeros: ExtNat },
    /// Partial sums of the diagonal exceed those of the eigenvalues.
    Majorization(Witness),
    /// Traces differ.
    Trace { lambda: CertifiedValue, d: CertifiedValue },
    /// `Σ_{i≤n} λ_i + ε λ_{n+1} < Σ_{i≤n+p} d_i` for every `n ≥ from`
    /// (`from = None`: for all sufficiently large `n`, by asymptotic dominance).
    Epsilon { p: u64, epsilon: Q, from: Option<u64> },
}

impl KernelWitness {
    pub fn to_json(&self) -> Value {
        match self {
            KernelWitness::Dimension { lambda, d } => json!({"kind": "dimension", "lambda": lambda.to_json(), "d": d.to_json()}),
            KernelWitness::Kernel { lambda_zeros, d_zeros } => {
                json!({"kind": "kernel", "lambda_zeros": lambda_zeros.to_json(), "d_zeros": d_zeros.to_json()})
            }
            KernelWitness::Majorization(w) => json!({"kind": "majorization", "witness": w.to_json()}),
            KernelWitness::Trace { lambda, d } => json!({"kind": "trace", "lambda": lambda.render(), "d": d.render()}),
            KernelWitness::Epsilon { p, epsilon, from } => json!({
                "kind": "epsilon",
                "p": p,
                "epsilon": fmt_q(epsilon),
                "from": from.map(Value::from).unwrap_or_else(|| Value::from("asymptotic")),
            }),
        }
    }
}

/// Four-valued result of the kernel test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelResult {
    Yes,
    No(KernelWitness),
    /// The necessary condition holds for every tested ε but the sufficient one fails.
    Inconclusive(String),
    Unknown(String),
}

impl KernelResult {
    pub fn label(&self) -> &'static str {
        match self {
            KernelResult::Yes => "yes",
            KernelResult::No(_) => "no",
            KernelResult::Inconclusive(_) => "inconclusive",
            KernelResult::Unknown(_) => "unknown",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            KernelResult::Yes => json!({"result": "yes"}),
            KernelResult::No(w) => json!({"result": "no", "witness": w.to_json()}),
            KernelResult::Inconclusive(why) => json!({"result": "inconclusive", "detail": why}),
            KernelResult::Unknown(why) => json!({"result": "unknown", "detail": why}),
        }
    }
}

/// Behaviour of `ρ_n = (Σ_{i≤n+p} d_i - Σ_{i≤n} λ_i) / λ_{n+1}` for one `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum PClass {
    /// `ρ_n ≤ 0` eventually: the sufficient condition holds.
    Holds,
    /// `ρ_n > ε` for all `n ≥ from`.
    Fails { epsilon: Q, from: Option<u64> },
    /// `0 < ρ_n ≤ ε` for every tested ε, for all large `n`.
    Gap(Q),
    Unknown(String),
    /// Holds for every `p` at once.
    HoldsAll,
}

/// The ε family `1, 1/2, ..., 2^-16`.
pub fn epsilon_family() -> Vec<Q> {
    (0..=EPSILON_FAMILY_DEPTH).map(|j| Q::new(1.into(), num_bigint::BigInt::from(1u64) << j)).collect()
}

/// Largest ε of the family strictly below `rho`, or `None`.
fn largest_eps_below(rho: &Q) -> Option<Q> {
    epsilon_family().into_iter().find(|e| e < rho)
}

fn classify_constant(rho: Q, from: u64) -> PClass {
    if !rho.is_positive() {
        PClass::Holds
    } else {
        match largest_eps_below(&rho) {
            Some(epsilon) => PClass::Fails { epsilon, from: Some(from) },
            None => PClass::Gap(rho),
        }
    }
}

/// Kernel test for nonnegative λ (eigenvalues, zeros = kernel dimension) and d.
pub fn kernel_test(lambda: &ExtendedSequence, d: &ExtendedSequence, work: &Work) -> KernelResult {
    let l = lambda.pos();
    let ds = d.pos();
    let zl = lambda.zeros();
    let zd = d.zeros();

    let dim_l = lambda.len();
    let dim_d = d.len();
    if dim_l != dim_d {
        return KernelResult::No(KernelWitness::Dimension { lambda: dim_l, d: dim_d });
    }
    if zl < zd {
        return KernelResult::No(KernelWitness::Kernel { lambda_zeros: zl, d_zeros: zd });
    }
    match riemann_sides(l, ds, work.n_work, work) {
        Status::Holds => {}
        Status::Fails(w) => return KernelResult::No(KernelWitness::Majorization(w)),
        Status::Unknown(why) => return KernelResult::Unknown(why),
    }
    let limit = gap_limit(l, ds, work);
    match (l.is_summable(), ds.is_summable()) {
        (true, true) => match limit.sign() {
            Some(Ordering::Equal) => {}
            Some(_) => return KernelResult::No(KernelWitness::Trace { lambda: l.total(work), d: ds.total(work) }),
            None => return KernelResult::Unknown(format!("trace difference {}", limit.render())),
        },
        (true, false) | (false, true) => {
            return KernelResult::No(KernelWitness::Trace { lambda: l.total(work), d: ds.total(work) })
        }
        (false, false) => {}
    }
    let z = match zd {
        ExtNat::Fin(_) => zl.checked_sub(zd).unwrap_or(ExtNat::ZERO),
        ExtNat::Inf => ExtNat::ZERO,
    };
    if z == ExtNat::ZERO {
        return KernelResult::Yes;
    }
    // Nonsummable pairs whose gaps stay above a positive level.
    if limit.sign() == Some(Ordering::Greater) {
        return KernelResult::Yes;
    }
    if limit.sign() != Some(Ordering::Equal) {
        return KernelResult::Unknown(format!("limit of partial-sum gaps is {}", limit.render()));
    }
    match z {
        ExtNat::Fin(p) => match classify(l, ds, p, work) {
            PClass::Holds | PClass::HoldsAll => KernelResult::Yes,
            PClass::Fails { epsilon, from } => KernelResult::No(KernelWitness::Epsilon { p, epsilon, from }),
            PClass::Gap(rho) => KernelResult::Inconclusive(format!(
                "with p = {p}: Σ_(i≤n+p) d_i - Σ_(i≤n) λ_i = {} λ_(n+1) > 0 for all large n, below every tested ε",
                fmt_q(&rho)
            )),
            PClass::Unknown(why) => KernelResult::Unknown(why),
        },
        ExtNat::Inf => {
            for p in 1..=P_MAX {
                match classify(l, ds, p, work) {
                    PClass::HoldsAll => return KernelResult::Yes,
                    PClass::Holds | PClass::Gap(_) => continue,
                    PClass::Fails { epsilon, from } => {
                        return KernelResult::No(KernelWitness::Epsilon { p, epsilon, from })
                    }
                    PClass::Unknown(why) => return KernelResult::Unknown(why),
                }
            }
            KernelResult::Unknown(format!("eventual dominance holds for p ≤ {P_MAX}; larger p not certified"))
        }
    }
}

/// Classifies `ρ_n` for fixed `p`, assuming the partial-sum gaps tend to zero.
fn classify(l: &Side, d: &Side, p: u64, work: &Work) -> PClass {
    let ll = l.prefix_len();
    let ld = d.prefix_len();
    let n0 = ll.max(ld.saturating_sub(p)).max(1);
    match (&l.tail, &d.tail) {
        (TailSpec::Zero, _) => PClass::HoldsAll,
        (_, TailSpec::Zero) => {
            // Σ_{i≤n+p} d_i is the full trace, so ρ_n = R_λ(n)/λ_{n+1} > 1.
            PClass::Fails { epsilon: Q::one(), from: Some(n0) }
        }
        (TailSpec::Multi(_), _) | (_, TailSpec::Multi(_)) => PClass::Unknown("interleaved tail families".into()),
        (TailSpec::Geometric { first: a, ratio: r }, TailSpec::Geometric { first: b, ratio: qd }) => {
            // For n ≥ n0: λ_{n+1} = a r^{n-ll}, R_λ(n) = λ_{n+1}/(1-r),
            // R_d(n+p) = b q^{n+p-ld}/(1-q), ρ_n = 1/(1-r) - R_d(n+p)/λ_{n+1}.
            let rho = |n: u64| -> Q {
                let lam = a * pow(r, n - ll);
                let rd = b * pow(qd, n + p - ld) / (Q::one() - qd);
                Q::one() / (Q::one() - r) - rd / lam
            };
            match qd.cmp(r) {
                Ordering::Equal => classify_constant(rho(n0), n0),
                Ordering::Greater => PClass::HoldsAll,
                Ordering::Less => {
                    // ρ_n increases to 1/(1-r) > 1.
                    match first_true(n0, work.n_work.saturating_mul(100), |n| rho(n) > Q::one()) {
                        Some(from) => PClass::Fails { epsilon: Q::one(), from: Some(from) },
                        None => PClass::Fails { epsilon: Q::one(), from: None },
                    }
                }
            }
        }
        (TailSpec::Power { coef: c1, exponent: s1, offset: o1 }, TailSpec::Power { coef: c2, exponent: s2, offset: o2 }) => {
            if s1 == s2 && c1 == c2 {
                // R_λ(n) - R_d(n+p) = Σ_{x=n+e1+1}^{n+p+e2} c x^{-s} with λ_k = c (k+e1)^{-s}.
                let e1 = *o1 as i128 - ll as i128;
                let e2 = *o2 as i128 - ld as i128;
                let m = p as i128 + e2 - e1;
                if m <= 0 {
                    PClass::Holds
                } else if m == 1 {
                    PClass::Fails { epsilon: q(1, 2), from: Some(n0) }
                } else {
                    PClass::Fails { epsilon: Q::one(), from: Some(n0) }
                }
            } else if s2 < s1 || (s1 == s2 && c2 > c1) {
                PClass::HoldsAll
            } else {
                PClass::Fails { epsilon: Q::one(), from: None }
            }
        }
        (TailSpec::Power { .. }, TailSpec::Geometric { .. }) => PClass::Fails { epsilon: Q::one(), from: None },
        (TailSpec::Geometric { .. }, TailSpec::Power { .. }) => PClass::HoldsAll,
    }
}

/// Exact check of the two kernel inequalities for `n0 ≤ n ≤ horizon`:
/// returns `(necessary_holds_for_all_eps_in_family, sufficient_fails_somewhere)`.
/// Used to validate constructed instances by brute force. `lambda` must be
/// nonnegative, so the smallest ε of the family decides the necessary side.
pub fn brute_force_kernel_window(lambda: &[Q], d: &[Q], p: u64, n0: u64, horizon: u64) -> (bool, bool) {
    let eps = Q::new(1.into(), num_bigint::BigInt::from(1u64) << EPSILON_FAMILY_DEPTH);
    let get = |v: &[Q], i: u64| v.get(i as usize).cloned().unwrap_or_else(Q::zero);
    // h = Σ_{i≤n} λ_i - Σ_{i≤n+p} d_i
    let mut h = Q::zero();
    for i in 0..n0 {
        h += get(lambda, i);
    }
    for i in 0..(n0 + p) {
        h -= get(d, i);
    }
    let mut suff_fails = false;
    for n in n0..=horizon {
        let next = get(lambda, n);
        if h.is_negative() {
            suff_fails = true;
            if (&h + &eps * &next).is_negative() {
                return (false, true);
            }
        }
        h += next;
        h -= get(d, n + p);
    }
    (true, suff_fails)
}

/// The eigenvalue list `2^{1-k}` with one zero, and a diagonal with the same
/// trace whose partial sums trail those of λ by exactly `gap · λ_{n+1}` once
/// shifted by one index. `gap = 2^-j` with `j > 16` sits below the ε family.
pub fn kernel_gap_instance(gap: &Q) -> (ExtendedSequence, ExtendedSequence) {
    let lambda = ExtendedSequence::positive(vec![], TailSpec::geometric(qi(1), q(1, 2)))
        .unwrap()
        .with_zeros(ExtNat::Fin(1));
    let d1 = q(1, 2) + gap * q(3, 4);
    let d2 = q(1, 2) - gap / qu(4);
    let b = (qi(2) - gap) / qu(4);
    let d = ExtendedSequence::positive(vec![d1, d2], TailSpec::geometric(b, q(1, 2))).unwrap();
    (lambda, d)
}
