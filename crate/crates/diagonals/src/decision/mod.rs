//! Decides whether an extended sequence `d` is the diagonal of some compact
//! self-adjoint operator with eigenvalue list `λ`.
//!
//! The procedure checks six necessary conditions, accepts when the total
//! excess is positive, and otherwise distributes the kernel of the operator
//! between the positive and negative parts and runs the kernel test on each.

mod explain;
mod kernel;

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::majorization::{excess, riemann_sides, ExcessReport, Status, Witness};
use crate::seqcore::{CertifiedValue, ExtNat, ExtendedSequence, Side, Work};

pub use explain::{explain, explain_at, explain_up_to, ExplainReport};
pub use kernel::{
    brute_force_kernel_window, epsilon_family, kernel_gap_instance, kernel_test, KernelResult, KernelWitness,
    EPSILON_FAMILY_DEPTH, P_MAX,
};

/// Evidence that one of the necessary conditions fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CondWitness {
    Majorization(Witness),
    /// The diagonal side is summable but the excesses are in the wrong order.
    ExcessOrder { sigma_plus: CertifiedValue, sigma_minus: CertifiedValue },
    /// Zero excess on one side with too few zeros or too few terms of that sign.
    Cardinality { lambda_zeros: ExtNat, d_zeros: ExtNat, lambda_side: ExtNat, d_side: ExtNat },
}

impl CondWitness {
    pub fn to_json(&self) -> Value {
        match self {
            CondWitness::Majorization(w) => w.to_json(),
            CondWitness::ExcessOrder { sigma_plus, sigma_minus } => json!({
                "kind": "excess_order",
                "sigma_plus": sigma_plus.render(),
                "sigma_minus": sigma_minus.render(),
            }),
            CondWitness::Cardinality { lambda_zeros, d_zeros, lambda_side, d_side } => json!({
                "kind": "cardinality",
                "lambda_zeros": lambda_zeros.to_json(),
                "d_zeros": d_zeros.to_json(),
                "lambda_side": lambda_side.to_json(),
                "d_side": d_side.to_json(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CondStatus {
    Holds,
    Fails(CondWitness),
    Unknown(String),
}

impl CondStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CondStatus::Holds => "holds",
            CondStatus::Fails(_) => "fails",
            CondStatus::Unknown(_) => "unknown",
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CondStatus::Holds => json!({"status": "holds"}),
            CondStatus::Fails(w) => json!({"status": "fails", "witness": w.to_json()}),
            CondStatus::Unknown(why) => json!({"status": "unknown", "detail": why}),
        }
    }

    fn from_status(s: Status) -> CondStatus {
        match s {
            Status::Holds => CondStatus::Holds,
            Status::Fails(w) => CondStatus::Fails(CondWitness::Majorization(w)),
            Status::Unknown(why) => CondStatus::Unknown(why),
        }
    }
}

/// The six necessary conditions.
///
/// * `p1`, `p2`: Riemann majorization of the positive and negative parts.
/// * `p3`: `d₊` summable implies `σ₋ ≥ σ₊`; `p4` symmetric.
/// * `p5`: `σ₊ = 0` implies at least as many zeros and nonnegative terms in λ as in d; `p6` symmetric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecessityTrace {
    pub p1: CondStatus,
    pub p2: CondStatus,
    pub p3: CondStatus,
    pub p4: CondStatus,
    pub p5: CondStatus,
    pub p6: CondStatus,
    pub excess: ExcessReport,
}

const CONDITION_NAMES: [&str; 6] = [
    "positive_majorization",
    "negative_majorization",
    "excess_order_positive",
    "excess_order_negative",
    "zero_excess_positive",
    "zero_excess_negative",
];

impl NecessityTrace {
    pub fn conditions(&self) -> [(&'static str, &CondStatus); 6] {
        let s = [&self.p1, &self.p2, &self.p3, &self.p4, &self.p5, &self.p6];
        std::array::from_fn(|i| (CONDITION_NAMES[i], s[i]))
    }

    pub fn any_fails(&self) -> bool {
        self.conditions().iter().any(|(_, c)| matches!(c, CondStatus::Fails(_)))
    }

    pub fn all_hold(&self) -> bool {
        self.conditions().iter().all(|(_, c)| matches!(c, CondStatus::Holds))
    }

    pub fn to_json(&self) -> Value {
        let mut m = serde_json::Map::new();
        for (name, c) in self.conditions() {
            m.insert(name.to_string(), c.to_json());
        }
        json!({
            "conditions": Value::Object(m),
            "sigma_plus": self.excess.sigma_plus.render(),
            "sigma_minus": self.excess.sigma_minus.render(),
            "summable": {
                "lambda_plus": self.excess.lambda_plus_summable.label(),
                "lambda_minus": self.excess.lambda_minus_summable.label(),
                "d_plus": self.excess.d_plus_summable.label(),
                "d_minus": self.excess.d_minus_summable.label(),
            },
        })
    }
}

fn excess_order(d_summable: bool, big: &CertifiedValue, small: &CertifiedValue, rep: &ExcessReport) -> CondStatus {
    if !d_summable {
        return CondStatus::Holds;
    }
    match big.certainly_ge(small) {
        Some(true) => CondStatus::Holds,
        Some(false) => CondStatus::Fails(CondWitness::ExcessOrder {
            sigma_plus: rep.sigma_plus.clone(),
            sigma_minus: rep.sigma_minus.clone(),
        }),
        None => CondStatus::Unknown(format!("cannot order {} and {}", big.render(), small.render())),
    }
}

fn zero_excess(sigma: &CertifiedValue, lambda: &ExtendedSequence, d: &ExtendedSequence, nonneg: bool) -> CondStatus {
    let (ls, ds) = if nonneg {
        (lambda.count_nonneg(), d.count_nonneg())
    } else {
        (lambda.count_nonpos(), d.count_nonpos())
    };
    let counts_ok = lambda.zeros() >= d.zeros() && ls >= ds;
    let witness = || {
        CondWitness::Cardinality { lambda_zeros: lambda.zeros(), d_zeros: d.zeros(), lambda_side: ls, d_side: ds }
    };
    match sigma.sign() {
        Some(Ordering::Greater) | Some(Ordering::Less) => CondStatus::Holds,
        Some(Ordering::Equal) if counts_ok => CondStatus::Holds,
        Some(Ordering::Equal) => CondStatus::Fails(witness()),
        None if counts_ok => CondStatus::Holds,
        None => CondStatus::Unknown(format!("excess {} may vanish", sigma.render())),
    }
}

/// Evaluates the six necessary conditions at the given work level.
pub fn check_necessity(lambda: &ExtendedSequence, d: &ExtendedSequence, work: &Work) -> NecessityTrace {
    let rep = excess(lambda, d, work);
    let p1 = CondStatus::from_status(riemann_sides(lambda.pos(), d.pos(), work.n_work, work));
    let p2 = CondStatus::from_status(riemann_sides(lambda.neg(), d.neg(), work.n_work, work));
    let p3 = excess_order(d.pos().is_summable(), &rep.sigma_minus, &rep.sigma_plus, &rep);
    let p4 = excess_order(d.neg().is_summable(), &rep.sigma_plus, &rep.sigma_minus, &rep);
    let p5 = zero_excess(&rep.sigma_plus, lambda, d, true);
    let p6 = zero_excess(&rep.sigma_minus, lambda, d, false);
    NecessityTrace { p1, p2, p3, p4, p5, p6, excess: rep }
}

/// A distribution of the kernel: `z1` zero eigenvalues go with the negative
/// part, `z2` with the positive part.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Splitting {
    pub z0: ExtNat,
    pub z1: ExtNat,
    pub z2: ExtNat,
}

impl Splitting {
    pub fn to_json(&self) -> Value {
        json!({"z0": self.z0.to_json(), "z1": self.z1.to_json(), "z2": self.z2.to_json()})
    }
}

/// Kernel distributions to examine when both excesses vanish.
pub fn enumerate_splittings(lambda: &ExtendedSequence, d: &ExtendedSequence) -> Vec<Splitting> {
    let z0 = lambda.zeros();
    match (z0, d.zeros()) {
        (ExtNat::Fin(l), ExtNat::Fin(k)) => {
            let n = l.saturating_sub(k);
            (0..=n).map(|z1| Splitting { z0, z1: ExtNat::Fin(z1), z2: ExtNat::Fin(n - z1) }).collect()
        }
        (ExtNat::Fin(_), ExtNat::Inf) => vec![Splitting { z0, z1: ExtNat::ZERO, z2: ExtNat::ZERO }],
        (ExtNat::Inf, ExtNat::Inf) => vec![Splitting { z0, z1: ExtNat::ZERO, z2: ExtNat::ZERO }],
        (ExtNat::Inf, ExtNat::Fin(_)) => vec![
            Splitting { z0, z1: ExtNat::ZERO, z2: ExtNat::Inf },
            Splitting { z0, z1: ExtNat::Inf, z2: ExtNat::ZERO },
            Splitting { z0, z1: ExtNat::Inf, z2: ExtNat::Inf },
        ],
    }
}

/// Kernel-test results for one splitting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingReport {
    pub splitting: Splitting,
    pub positive: KernelResult,
    pub negative: KernelResult,
}

impl SplittingReport {
    pub fn to_json(&self) -> Value {
        json!({
            "splitting": self.splitting.to_json(),
            "positive": self.positive.to_json(),
            "negative": self.negative.to_json(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Diagonal,
    NotDiagonal,
    KernelInconclusive,
    PrecisionUnknown,
}

impl Outcome {
    pub fn label(self) -> &'static str {
        match self {
            Outcome::Diagonal => "Diagonal",
            Outcome::NotDiagonal => "NotDiagonal",
            Outcome::KernelInconclusive => "KernelInconclusive",
            Outcome::PrecisionUnknown => "PrecisionUnknown",
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Diagonal => 0,
            Outcome::NotDiagonal => 1,
            Outcome::KernelInconclusive => 2,
            Outcome::PrecisionUnknown => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub level: u8,
    pub trace: NecessityTrace,
    pub splittings_examined: Vec<SplittingReport>,
    pub detail: String,
}

impl Verdict {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "outcome": self.outcome.label(),
            "level": self.level,
            "detail": self.detail,
            "necessity": self.trace.to_json(),
            "splittings": self.splittings_examined.iter().map(SplittingReport::to_json).collect::<Vec<_>>(),
        })
    }
}

impl Verdict {
    /// Plain-text rendering; carries the same outcome as the JSON form.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "outcome: {} (work level {})", self.outcome.label(), self.level);
        let _ = writeln!(s, "  {}", self.detail);
        let _ = writeln!(s, "excess: σ+ = {}, σ- = {}", self.trace.excess.sigma_plus, self.trace.excess.sigma_minus);
        let _ = writeln!(s, "necessary conditions:");
        for (name, c) in self.trace.conditions() {
            let extra = match c {
                CondStatus::Holds => String::new(),
                CondStatus::Fails(w) => format!("  witness {}", w.to_json()),
                CondStatus::Unknown(why) => format!("  ({why})"),
            };
            let _ = writeln!(s, "  {:<24}{}{}", name, c.label(), extra);
        }
        for r in &self.splittings_examined {
            let _ = writeln!(
                s,
                "splitting z1 = {}, z2 = {}: positive {}, negative {}",
                r.splitting.z1,
                r.splitting.z2,
                r.positive.label(),
                r.negative.label()
            );
            for (side, k) in [("positive", &r.positive), ("negative", &r.negative)] {
                match k {
                    KernelResult::No(w) => {
                        let _ = writeln!(s, "    {side}: {}", w.to_json());
                    }
                    KernelResult::Inconclusive(why) | KernelResult::Unknown(why) => {
                        let _ = writeln!(s, "    {side}: {why}");
                    }
                    KernelResult::Yes => {}
                }
            }
        }
        s
    }
}

fn side_sequence(side: &Side, zeros: ExtNat) -> ExtendedSequence {
    ExtendedSequence::from_sides(side.clone(), Side::default(), zeros)
}

/// Runs the kernel test on both halves of a splitting.
pub fn test_splitting(lambda: &ExtendedSequence, d: &ExtendedSequence, s: Splitting, work: &Work) -> SplittingReport {
    let positive = kernel_test(&side_sequence(lambda.pos(), s.z2), &side_sequence(d.pos(), ExtNat::ZERO), work);
    let negative = kernel_test(&side_sequence(lambda.neg(), s.z1), &side_sequence(d.neg(), ExtNat::ZERO), work);
    SplittingReport { splitting: s, positive, negative }
}

/// The decision procedure at one work level.
pub fn decide_at(lambda: &ExtendedSequence, d: &ExtendedSequence, level: u8) -> Verdict {
    let work = Work::level(level);
    let trace = check_necessity(lambda, d, &work);
    let verdict = |outcome, splittings, detail: String| Verdict {
        outcome,
        level,
        trace: trace.clone(),
        splittings_examined: splittings,
        detail,
    };
    // Entries of the diagonal and eigenvalues with kernel both count the dimension.
    let (dim_l, dim_d) = (lambda.len(), d.len());
    if dim_l != dim_d {
        return verdict(Outcome::NotDiagonal, vec![], format!("dimension mismatch: λ has {dim_l} entries, d has {dim_d}"));
    }
    if trace.any_fails() {
        let failed: Vec<_> = trace.conditions().iter().filter(|(_, c)| matches!(c, CondStatus::Fails(_))).map(|(n, _)| *n).collect();
        return verdict(Outcome::NotDiagonal, vec![], format!("necessary condition fails: {}", failed.join(", ")));
    }
    if !trace.all_hold() {
        return verdict(Outcome::PrecisionUnknown, vec![], "a necessary condition could not be certified".into());
    }
    let total = trace.excess.sigma_plus.clone() + trace.excess.sigma_minus.clone();
    match total.sign() {
        Some(Ordering::Greater) => {
            return verdict(Outcome::Diagonal, vec![], format!("total excess {} is positive", total.render()))
        }
        Some(Ordering::Equal) => {}
        _ => return verdict(Outcome::PrecisionUnknown, vec![], format!("total excess {} not certified positive", total.render())),
    }
    let mut reports = Vec::new();
    let mut any_open = false;
    let mut any_unknown = false;
    for s in enumerate_splittings(lambda, d) {
        let r = test_splitting(lambda, d, s, &work);
        let yes = matches!(r.positive, KernelResult::Yes) && matches!(r.negative, KernelResult::Yes);
        let no = matches!(r.positive, KernelResult::No(_)) || matches!(r.negative, KernelResult::No(_));
        if !no {
            any_open = true;
            if matches!(r.positive, KernelResult::Unknown(_)) || matches!(r.negative, KernelResult::Unknown(_)) {
                any_unknown = true;
            }
        }
        reports.push(r);
        if yes {
            return verdict(Outcome::Diagonal, reports, "both kernel tests succeed for a splitting of the kernel".into());
        }
    }
    if !any_open {
        verdict(Outcome::NotDiagonal, reports, "every splitting of the kernel violates a necessary kernel condition".into())
    } else if any_unknown {
        verdict(Outcome::PrecisionUnknown, reports, "a kernel test could not be certified".into())
    } else {
        verdict(Outcome::KernelInconclusive, reports, "kernel condition lies between the necessary and sufficient tests".into())
    }
}

/// The decision procedure, escalating the work level while the answer is
/// `PrecisionUnknown`.
pub fn decide(lambda: &ExtendedSequence, d: &ExtendedSequence) -> Verdict {
    decide_up_to(lambda, d, 3)
}

/// As [`decide`], stopping at `max_level`.
pub fn decide_up_to(lambda: &ExtendedSequence, d: &ExtendedSequence, max_level: u8) -> Verdict {
    let mut v = decide_at(lambda, d, 1);
    for level in 2..=max_level.max(1) {
        if v.outcome != Outcome::PrecisionUnknown {
            break;
        }
        v = decide_at(lambda, d, level);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::num::{q, qi};
    use crate::seqcore::TailSpec;

    fn geo(a: crate::seqcore::Q, r: crate::seqcore::Q) -> ExtendedSequence {
        ExtendedSequence::positive(vec![], TailSpec::geometric(a, r)).unwrap()
    }

    #[test]
    fn positive_excess_is_diagonal() {
        // [[0, 1], [1, 0]] has eigenvalues 1, -1 and zero diagonal.
        let lam = ExtendedSequence::from_terms(&[qi(1), qi(-1)]);
        let d = ExtendedSequence::from_terms(&[qi(0), qi(0)]);
        assert_eq!(decide(&lam, &d).outcome, Outcome::Diagonal);
        // A positive trace-class operator keeps its trace on the diagonal.
        let lam = ExtendedSequence::positive(vec![qi(2)], TailSpec::geometric(q(1, 2), q(1, 2))).unwrap();
        let d = geo(qi(1), q(1, 2));
        let v = decide(&lam, &d);
        assert_eq!(v.outcome, Outcome::NotDiagonal);
        assert!(matches!(v.trace.p3, CondStatus::Fails(_)));
    }

    #[test]
    fn kernel_cannot_be_absorbed() {
        let lam = geo(qi(1), q(1, 2)).with_zeros(ExtNat::Fin(1));
        let d = geo(qi(1), q(1, 2));
        let v = decide(&lam, &d);
        assert_eq!(v.outcome, Outcome::NotDiagonal);
        assert_eq!(v.splittings_examined.len(), 2);
    }

    #[test]
    fn majorization_failure() {
        let lam = ExtendedSequence::from_terms(&[qi(1)]);
        let d = ExtendedSequence::from_terms(&[qi(2)]);
        let v = decide(&lam, &d);
        assert_eq!(v.outcome, Outcome::NotDiagonal);
        assert!(matches!(v.trace.p1, CondStatus::Fails(_)));
    }

    #[test]
    fn splittings_enumeration() {
        let lam = geo(qi(1), q(1, 2)).with_zeros(ExtNat::Inf);
        let d = geo(qi(1), q(1, 2)).with_zeros(ExtNat::Fin(3));
        assert_eq!(enumerate_splittings(&lam, &d).len(), 3);
        let lam = geo(qi(1), q(1, 2)).with_zeros(ExtNat::Fin(5));
        let d = geo(qi(1), q(1, 2)).with_zeros(ExtNat::Fin(2));
        let s = enumerate_splittings(&lam, &d);
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|x| x.z1 + x.z2 == ExtNat::Fin(3)));
    }
}
