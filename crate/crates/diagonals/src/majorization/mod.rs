//! The level functional δ, Riemann and Lebesgue majorization, and excess.

mod eventual;

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::seqcore::num::{fmt_q, qu};
use crate::seqcore::{CertifiedValue, ExtendedSequence, Side, Work, Q};

pub use eventual::{gap_at, gap_limit, regime, summable_difference, Regime};

/// Concrete evidence that a majorization inequality fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `Σ_{i≤n} λ_i - Σ_{i≤n} d_i = gap < 0`.
    PartialSum { n: u64, gap: CertifiedValue },
    /// `δ(alpha, λ, d) = delta < 0`.
    Level { alpha: Q, delta: CertifiedValue },
    /// The partial-sum gaps converge to `limit < 0`, so some gap is negative;
    /// used when the first such index lies beyond the search cap.
    Limit { limit: CertifiedValue },
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::PartialSum { n, gap } => json!({"kind": "partial_sum", "n": n, "gap": gap.render()}),
            Witness::Level { alpha, delta } => json!({"kind": "level", "alpha": fmt_q(alpha), "delta": delta.render()}),
            Witness::Limit { limit } => json!({"kind": "limit", "limit": limit.render()}),
        }
    }
}

/// Three-valued outcome of a majorization check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails(Witness),
    Unknown(String),
}

impl Status {
    pub fn holds(&self) -> bool {
        matches!(self, Status::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, Status::Fails(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails(_) => "fails",
            Status::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum MajError {
    #[error("delta is undefined at alpha = 0")]
    ZeroLevel,
}

/// Yes/no/unknown flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Tri {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Tri::Yes => "yes",
            Tri::No => "no",
            Tri::Unknown => "unknown",
        }
    }
}

/// Positive and negative excess together with the summability of every part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExcessReport {
    pub sigma_plus: CertifiedValue,
    pub sigma_minus: CertifiedValue,
    pub lambda_plus_summable: Tri,
    pub lambda_minus_summable: Tri,
    pub d_plus_summable: Tri,
    pub d_minus_summable: Tri,
}

impl ExcessReport {
    /// The report of `(-λ, -d)`.
    pub fn mirrored(&self) -> ExcessReport {
        ExcessReport {
            sigma_plus: self.sigma_minus.clone(),
            sigma_minus: self.sigma_plus.clone(),
            lambda_plus_summable: self.lambda_minus_summable,
            lambda_minus_summable: self.lambda_plus_summable,
            d_plus_summable: self.d_minus_summable,
            d_minus_summable: self.d_plus_summable,
        }
    }
}

/// Sign selector for knots and one-sided checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Positive,
    Negative,
}

/// Distinct levels of λ at which δ has to be checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotList {
    pub values: Vec<Q>,
}

/// `δ(α, λ, d)`: total excess of λ over the level `α` minus that of `d`.
/// For `α < 0` the excess is measured below the level.
pub fn delta(alpha: &Q, lambda: &ExtendedSequence, d: &ExtendedSequence, work: &Work) -> Result<CertifiedValue, MajError> {
    if alpha.is_zero() {
        return Err(MajError::ZeroLevel);
    }
    Ok(if alpha.is_positive() {
        side_delta(alpha, lambda.pos(), d.pos(), work)
    } else {
        side_delta(&-alpha, lambda.neg(), d.neg(), work)
    })
}

/// δ for one side of magnitudes at a positive level.
pub fn side_delta(alpha: &Q, l: &Side, d: &Side, work: &Work) -> CertifiedValue {
    l.excess_above(alpha, work) - d.excess_above(alpha, work)
}

/// Distinct nonzero values of λ on one side: the listed values exactly and the
/// first `k_tail` tail terms. Negative direction yields negative values.
pub fn knots(lambda: &ExtendedSequence, direction: Direction, k_tail: u64) -> KnotList {
    match direction {
        Direction::Positive => KnotList { values: lambda.pos().knots(k_tail) },
        Direction::Negative => KnotList { values: lambda.neg().knots(k_tail).into_iter().map(|x| -x).collect() },
    }
}

/// `δ(α) ≥ 0` for every `α ≠ 0`, reduced to checks at the levels of λ and
/// completed by the partial-sum characterization below the sampled levels.
pub fn lebesgue_majorizes(lambda: &ExtendedSequence, d: &ExtendedSequence, work: &Work) -> Status {
    let pos = lebesgue_side(lambda.pos(), d.pos(), work);
    match pos {
        Status::Fails(_) => return pos,
        Status::Unknown(_) => {
            if let Status::Fails(Witness::Level { alpha, delta }) = lebesgue_side(lambda.neg(), d.neg(), work) {
                return Status::Fails(Witness::Level { alpha: -alpha, delta });
            }
            return pos;
        }
        Status::Holds => {}
    }
    match lebesgue_side(lambda.neg(), d.neg(), work) {
        Status::Fails(Witness::Level { alpha, delta }) => Status::Fails(Witness::Level { alpha: -alpha, delta }),
        other => other,
    }
}

/// One-sided Lebesgue check on magnitudes.
pub fn lebesgue_side(l: &Side, d: &Side, work: &Work) -> Status {
    let mut levels = l.knots(work.k_tail);
    levels.extend(d.knots(work.k_tail.min(8)));
    levels.sort_by(|a, b| b.cmp(a));
    levels.dedup();
    let mut unknown = false;
    for alpha in &levels {
        let v = side_delta(alpha, l, d, work);
        match v.sign() {
            Some(Ordering::Less) => return Status::Fails(Witness::Level { alpha: alpha.clone(), delta: v }),
            None => unknown = true,
            _ => {}
        }
    }
    // Below the sampled levels, Lebesgue and Riemann majorization agree.
    match riemann_sides(l, d, work.n_work, work) {
        Status::Holds if !unknown => Status::Holds,
        Status::Holds => Status::Unknown("a level value straddles zero".into()),
        Status::Unknown(why) => Status::Unknown(why),
        Status::Fails(Witness::PartialSum { n, .. }) => {
            // Some level among λ_1..λ_{n+1}, d_1..d_n witnesses the failure.
            let mut cands = l.terms(n + 1);
            cands.extend(d.terms(n));
            cands.retain(|x| x.is_positive());
            cands.sort_by(|a, b| b.cmp(a));
            cands.dedup();
            for alpha in &cands {
                let v = side_delta(alpha, l, d, work);
                if v.sign() == Some(Ordering::Less) {
                    return Status::Fails(Witness::Level { alpha: alpha.clone(), delta: v });
                }
            }
            // Below every listed level δ is affine and the failure shows up
            // only near zero.
            if let Some(mut alpha) = cands.last().cloned() {
                for _ in 0..256 {
                    alpha /= qu(2);
                    let v = side_delta(&alpha, l, d, work);
                    if v.sign() == Some(Ordering::Less) {
                        return Status::Fails(Witness::Level { alpha, delta: v });
                    }
                }
            }
            Status::Unknown("partial sums fail but no level witness was found".into())
        }
        Status::Fails(w) => Status::Fails(w),
    }
}

/// Riemann majorization of the positive parts: `Σ_{i≤n} d_i ≤ Σ_{i≤n} λ_i` for all `n`.
pub fn riemann_majorizes(lambda_pos: &ExtendedSequence, d_pos: &ExtendedSequence, horizon: u64, work: &Work) -> Status {
    riemann_sides(lambda_pos.pos(), d_pos.pos(), horizon, work)
}

/// Riemann majorization for two nonincreasing sides.
///
/// Partial sums are scanned exactly until both sequences are in a regime where
/// `λ_k - d_k` changes sign at most once; the remaining infimum is then one of
/// finitely many closed-form partial sums or the limit.
pub fn riemann_sides(l: &Side, d: &Side, horizon: u64, work: &Work) -> Status {
    let reg = regime(l, d, work);
    let must = match &reg {
        Some(r) => r.start.saturating_sub(1),
        None => horizon,
    };
    let extra = 64u64;
    let scan_to = if must > horizon { horizon } else { (must + extra).min(horizon.max(must)) };

    let mut g = Q::zero();
    let mut li = l.iter();
    let mut di = d.iter();
    for n in 1..=scan_to {
        let a = li.next();
        let b = di.next();
        if a.is_none() && b.is_none() {
            // Both finite and exhausted: the gap is constant from here on.
            return if g.is_negative() {
                Status::Fails(Witness::PartialSum { n, gap: CertifiedValue::Exact(g) })
            } else {
                Status::Holds
            };
        }
        g += a.unwrap_or_else(Q::zero) - b.unwrap_or_else(Q::zero);
        if g.is_negative() {
            return Status::Fails(Witness::PartialSum { n, gap: CertifiedValue::Exact(g) });
        }
    }
    let Some(r) = reg else {
        return Status::Unknown(format!("no tail comparison available; partial sums hold up to {scan_to}"));
    };
    if must > horizon {
        return Status::Unknown(format!("tail regime starts at {} beyond horizon {horizon}", r.start));
    }
    let t = scan_to;
    let limit = gap_limit(l, d, work);
    let mut unknown: Option<String> = None;

    // Decreasing stretch before the crossing.
    if t + 1 < r.k0 && r.before == Ordering::Less {
        let end = r.k0 - 1;
        let v = gap_at(l, d, end, work);
        match v.sign() {
            Some(Ordering::Less) => return first_negative(l, d, t + 1, end, work),
            None => unknown = Some(format!("partial-sum gap at n = {end} straddles zero")),
            _ => {}
        }
    }
    if r.after == Ordering::Less {
        match limit.sign() {
            Some(Ordering::Less) => {
                let from = if t + 1 < r.k0 { r.k0 - 1 } else { t };
                return match first_negative(l, d, from.max(1), u64::MAX, work) {
                    Status::Unknown(_) => Status::Fails(Witness::Limit { limit }),
                    found => found,
                };
            }
            None => unknown = Some(format!("limit of partial-sum gaps is {}", limit.render())),
            _ => {}
        }
    }
    match unknown {
        Some(why) => Status::Unknown(why),
        None => Status::Holds,
    }
}

/// First `n ≥ from` with a certified negative gap, for a gap that is
/// nonincreasing on `[from, ∞)`.
fn first_negative(l: &Side, d: &Side, from: u64, cap: u64, work: &Work) -> Status {
    let cap = cap.min(work.n_work.saturating_mul(1000));
    let found = crate::seqcore::first_true(from, cap, |n| gap_at(l, d, n, work).sign() == Some(Ordering::Less));
    match found {
        Some(n) => Status::Fails(Witness::PartialSum { n, gap: gap_at(l, d, n, work) }),
        None => Status::Unknown("gaps tend to a negative limit but no index was certified".into()),
    }
}

/// σ₊ and σ₋ with summability flags.
pub fn excess(lambda: &ExtendedSequence, d: &ExtendedSequence, work: &Work) -> ExcessReport {
    ExcessReport {
        sigma_plus: gap_limit(lambda.pos(), d.pos(), work),
        sigma_minus: gap_limit(lambda.neg(), d.neg(), work),
        lambda_plus_summable: Tri::from_bool(lambda.pos().is_summable()),
        lambda_minus_summable: Tri::from_bool(lambda.neg().is_summable()),
        d_plus_summable: Tri::from_bool(d.pos().is_summable()),
        d_minus_summable: Tri::from_bool(d.neg().is_summable()),
    }
}

/// Comparison of the two majorization notions on finitely supported data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LrReport {
    pub riemann: bool,
    pub lebesgue_knots: bool,
    pub lebesgue_grid: bool,
    pub riemann_liminf: Q,
    pub lebesgue_liminf: Q,
}

impl LrReport {
    /// Both notions agree, knots agree with the full grid, and the limits coincide.
    pub fn consistent(&self) -> bool {
        self.riemann == self.lebesgue_knots && self.lebesgue_knots == self.lebesgue_grid && self.riemann_liminf == self.lebesgue_liminf
    }
}

/// Evaluates both sides of the Riemann/Lebesgue equivalence on finite,
/// nonnegative data with exact arithmetic.
pub fn lr_equivalence_check(lambda_pos: &[Q], d_pos: &[Q]) -> LrReport {
    let mut l: Vec<Q> = lambda_pos.iter().filter(|x| x.is_positive()).cloned().collect();
    let mut d: Vec<Q> = d_pos.iter().filter(|x| x.is_positive()).cloned().collect();
    l.sort_by(|a, b| b.cmp(a));
    d.sort_by(|a, b| b.cmp(a));
    let n = l.len().max(d.len());
    let at = |v: &Vec<Q>, i: usize| v.get(i).cloned().unwrap_or_else(Q::zero);

    let mut g = Q::zero();
    let mut riemann = true;
    for i in 0..n {
        g += at(&l, i) - at(&d, i);
        if g.is_negative() {
            riemann = false;
        }
    }
    let riemann_liminf = g;

    let dl = |alpha: &Q| -> Q {
        let f = |v: &Vec<Q>| v.iter().filter(|x| *x >= alpha).map(|x| x - alpha).sum::<Q>();
        f(&l) - f(&d)
    };
    let mut kn = l.clone();
    kn.dedup();
    // With finitely many positive terms the levels of λ leave (0, min λ)
    // uncovered; there δ is affine with limit Σλ - Σd at zero.
    let total = l.iter().sum::<Q>() - d.iter().sum::<Q>();
    let lebesgue_knots = kn.iter().all(|a| !dl(a).is_negative()) && !total.is_negative();

    let mut grid: Vec<Q> = l.iter().chain(d.iter()).cloned().collect();
    grid.sort_by(|a, b| b.cmp(a));
    grid.dedup();
    let mut pts = grid.clone();
    for w in grid.windows(2) {
        pts.push((&w[0] + &w[1]) / qu(2));
    }
    if let Some(top) = grid.first() {
        pts.push(top + Q::from_integer(1.into()));
    }
    if let Some(bot) = grid.last() {
        pts.push(bot / qu(2));
    }
    let lebesgue_grid = pts.iter().all(|a| !dl(a).is_negative()) && !total.is_negative();

    // δ is affine below the smallest term: extrapolate from two levels.
    let base = grid.last().cloned().unwrap_or_else(|| Q::from_integer(1.into()));
    let a1 = &base / qu(2);
    let a2 = &base / qu(4);
    let lebesgue_liminf = (&a1 * dl(&a2) - &a2 * dl(&a1)) / (&a1 - &a2);

    LrReport { riemann, lebesgue_knots, lebesgue_grid, riemann_liminf, lebesgue_liminf }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::num::{q, qi};
    use crate::seqcore::{ExtNat, TailSpec};

    fn geo(a: Q, r: Q) -> ExtendedSequence {
        ExtendedSequence::positive(vec![], TailSpec::geometric(a, r)).unwrap()
    }

    #[test]
    fn delta_examples() {
        let w = Work::default();
        let l = geo(qi(1), q(1, 2));
        let d = geo(q(1, 2), q(1, 2));
        assert_eq!(delta(&q(1, 2), &l, &d, &w).unwrap(), CertifiedValue::Exact(q(1, 2)));
        for a in [q(1, 3), q(-1, 5), qi(2)] {
            assert_eq!(delta(&a, &l, &l, &w).unwrap(), CertifiedValue::zero());
        }
        let l = ExtendedSequence::from_terms(&[qi(-1)]);
        let d = ExtendedSequence::from_terms(&[]);
        assert_eq!(delta(&q(-1, 2), &l, &d, &w).unwrap(), CertifiedValue::Exact(q(1, 2)));
        assert!(delta(&qi(0), &l, &d, &w).is_err());
    }

    #[test]
    fn knot_examples() {
        let s = ExtendedSequence::from_terms(&[qi(3), qi(1), qi(1)]);
        assert_eq!(knots(&s, Direction::Positive, 64).values, vec![qi(3), qi(1)]);
        assert_eq!(knots(&geo(qi(1), q(1, 2)), Direction::Positive, 3).values, vec![qi(1), q(1, 2), q(1, 4)]);
        assert!(knots(&ExtendedSequence::from_terms(&[qi(-1)]), Direction::Positive, 3).values.is_empty());
    }

    #[test]
    fn lebesgue_examples() {
        let w = Work::default();
        assert!(lebesgue_majorizes(&geo(qi(1), q(1, 2)), &geo(q(1, 2), q(1, 2)), &w).holds());
        let st = lebesgue_majorizes(&ExtendedSequence::from_terms(&[qi(1)]), &ExtendedSequence::from_terms(&[qi(2)]), &w);
        match st {
            Status::Fails(Witness::Level { alpha, delta }) => {
                assert!(alpha > qi(0) && alpha <= qi(2));
                assert_eq!(delta.sign(), Some(Ordering::Less));
            }
            other => panic!("{other:?}"),
        }
        let s = geo(qi(3), q(2, 3));
        assert!(lebesgue_majorizes(&s, &s, &w).holds());
    }

    #[test]
    fn riemann_examples() {
        let w = Work::default();
        assert!(riemann_majorizes(&geo(qi(1), q(1, 2)), &geo(q(1, 2), q(1, 2)), 1000, &w).holds());
        let s = ExtendedSequence::positive(vec![qi(2)], TailSpec::power(qi(1), 2, 3)).unwrap();
        assert!(riemann_majorizes(&s, &s, 1000, &w).holds());
        let st = riemann_majorizes(
            &ExtendedSequence::from_terms(&[qi(1), qi(1)]),
            &ExtendedSequence::from_terms(&[qi(1), qi(1), qi(1)]),
            1000,
            &w,
        );
        assert_eq!(st, Status::Fails(Witness::PartialSum { n: 3, gap: CertifiedValue::Exact(qi(-1)) }));
    }

    #[test]
    fn riemann_limit_failure_is_located() {
        // λ = 2^{1-k}, d = (1, 1, 0, ...) followed by nothing: G_2 = 3/2 - 2 < 0
        let w = Work::default();
        let l = geo(qi(1), q(1, 2));
        let d = geo(qi(1), q(3, 4));
        // Σλ = 2 < Σd = 4, d decays slower.
        match riemann_majorizes(&l, &d, 1000, &w) {
            Status::Fails(Witness::PartialSum { n, gap }) => {
                assert_eq!(n, 2);
                assert_eq!(gap, CertifiedValue::Exact(q(3, 2) - q(7, 4)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn excess_examples() {
        let w = Work::default();
        // λ = (1, 1, -1/2, -1/4, ...), d = (1/2, 1/4, ...)
        let lam = ExtendedSequence::new(vec![qi(1), qi(1)], TailSpec::Zero, TailSpec::geometric(q(1, 2), q(1, 2)), ExtNat::ZERO).unwrap();
        let d = geo(q(1, 2), q(1, 2));
        let r = excess(&lam, &d, &w);
        assert_eq!(r.sigma_plus, CertifiedValue::Exact(qi(1)));
        assert_eq!(r.sigma_minus, CertifiedValue::Exact(qi(1)));
        let r = excess(&lam, &lam, &w);
        assert_eq!((r.sigma_plus, r.sigma_minus), (CertifiedValue::zero(), CertifiedValue::zero()));
        let h = ExtendedSequence::positive(vec![], TailSpec::power(qi(1), 1, 0)).unwrap();
        assert_eq!(excess(&h, &geo(qi(1), q(1, 2)), &w).sigma_plus, CertifiedValue::PlusInfinity);
    }

    #[test]
    fn lr_examples() {
        let r = lr_equivalence_check(&[qi(3), qi(2)], &[qi(2), qi(2), qi(1)]);
        assert!(r.riemann && r.lebesgue_knots && r.consistent());
        assert_eq!(r.riemann_liminf, qi(0));
        let r = lr_equivalence_check(&[qi(1)], &[qi(2)]);
        assert!(!r.riemann && !r.lebesgue_knots && r.consistent());
    }
}
