use proptest::prelude::*;

use diagonals::majorization::{delta, excess, lebesgue_majorizes, lr_equivalence_check, riemann_majorizes};
use diagonals::seqcore::num::{q, qi};
use diagonals::seqcore::{decreasing_rearrangement, CertifiedValue, ExtendedSequence, TailSpec, Work, Q};

fn rational() -> impl Strategy<Value = Q> {
    (0i64..=24, prop::sample::select(vec![1i64, 2, 3, 4, 6, 8])).prop_map(|(n, d)| q(n, d))
}

fn positive() -> impl Strategy<Value = Q> {
    (1i64..=24, prop::sample::select(vec![1i64, 2, 3, 4, 6, 8])).prop_map(|(n, d)| q(n, d))
}

fn finite_pair() -> impl Strategy<Value = (Vec<Q>, Vec<Q>)> {
    (prop::collection::vec(rational(), 0..20), prop::collection::vec(rational(), 0..20), prop::collection::vec(1i64..=4, 20), any::<bool>())
        .prop_map(|(l, d, scale, derived)| {
            if derived {
                // d below λ termwise, then sorted: λ majorizes d
                let mut s = l.clone();
                s.sort_by(|a, b| b.cmp(a));
                let d = s.iter().zip(&scale).map(|(x, k)| x * q(*k, 4)).collect();
                (l, d)
            } else {
                (l, d)
            }
        })
}

fn desc(v: &[Q]) -> Vec<Q> {
    let mut v: Vec<Q> = v.iter().filter(|x| **x > qi(0)).cloned().collect();
    v.sort_by(|a, b| b.cmp(a));
    v
}

/// Direct partial-sum comparison of the sorted lists.
fn naive_riemann(l: &[Q], d: &[Q]) -> (bool, Q) {
    let (l, d) = (desc(l), desc(d));
    let n = l.len().max(d.len());
    let mut g = qi(0);
    let mut ok = true;
    for i in 0..n {
        g += l.get(i).cloned().unwrap_or_default() - d.get(i).cloned().unwrap_or_default();
        ok &= g >= qi(0);
    }
    (ok, g)
}

/// `Σ (λ_i - α)_+ - Σ (d_i - α)_+` for `α > 0` straight from the definition.
fn naive_delta(a: &Q, l: &[Q], d: &[Q]) -> Q {
    let pos = |v: &[Q]| v.iter().filter(|x| *x >= a).map(|x| x - a).sum::<Q>();
    pos(l) - pos(d)
}

fn grid(l: &[Q], d: &[Q]) -> Vec<Q> {
    let mut pts: Vec<Q> = l.iter().chain(d.iter()).filter(|x| **x > qi(0)).cloned().collect();
    pts.sort();
    pts.dedup();
    let mut g = pts.clone();
    for w in pts.windows(2) {
        g.push((&w[0] + &w[1]) / qi(2));
    }
    if let Some(first) = pts.first() {
        g.push(first / qi(2));
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn riemann_and_lebesgue_agree_on_finite_pairs((l, d) in finite_pair()) {
        let w = Work::default();
        let (ls, ds) = (ExtendedSequence::from_terms(&l), ExtendedSequence::from_terms(&d));
        let (naive, limit) = naive_riemann(&l, &d);
        let r = riemann_majorizes(&ls, &ds, w.n_work, &w);
        let leb = lebesgue_majorizes(&ls, &ds, &w);
        prop_assert_eq!(r.holds(), naive);
        prop_assert_eq!(leb.holds(), naive);
        prop_assert!(r.holds() || r.fails());
        let grid_ok = grid(&l, &d).iter().all(|a| naive_delta(a, &l, &d) >= qi(0)) && limit >= qi(0);
        prop_assert_eq!(grid_ok, naive);
        let rep = lr_equivalence_check(&l, &d);
        prop_assert!(rep.consistent());
        prop_assert_eq!(rep.riemann_liminf, limit);
    }

    #[test]
    fn delta_matches_definition_and_is_linear_between_knots((l, d) in finite_pair()) {
        let w = Work::default();
        let (ls, ds) = (ExtendedSequence::from_terms(&l), ExtendedSequence::from_terms(&d));
        let mut knots: Vec<Q> = l.iter().chain(d.iter()).filter(|x| **x > qi(0)).cloned().collect();
        knots.sort();
        knots.dedup();
        let ev = |a: &Q| delta(a, &ls, &ds, &w).unwrap().exact().cloned().unwrap();
        for a in grid(&l, &d) {
            prop_assert_eq!(ev(&a), naive_delta(&a, &l, &d));
        }
        for k in knots.windows(2) {
            let (a, b) = (&k[0], &k[1]);
            let t = (a * qi(2) + b) / qi(3);
            // three collinear points on [a, b]
            prop_assert_eq!(ev(&t) * qi(3), ev(a) * qi(2) + ev(b));
        }
    }

    #[test]
    fn termwise_domination_survives_rearrangement(pairs in prop::collection::vec((positive(), 1i64..=4), 1..25)) {
        let l: Vec<Q> = pairs.iter().map(|(x, _)| x.clone()).collect();
        let d: Vec<Q> = pairs.iter().map(|(x, k)| x * q(*k, 4)).collect();
        let lr = decreasing_rearrangement(&ExtendedSequence::from_terms(&l)).unwrap();
        let dr = decreasing_rearrangement(&ExtendedSequence::from_terms(&d)).unwrap();
        let n = l.len() as u64;
        let (lt, dt) = (lr.pos().terms(n), dr.pos().terms(n));
        prop_assert!(lt.iter().zip(&dt).all(|(a, b)| a >= b));
        let s1: Q = lt.iter().zip(&dt).map(|(a, b)| a - b).sum();
        let s2: Q = l.iter().zip(&d).map(|(a, b)| a - b).sum();
        prop_assert_eq!(s1, s2);
    }

    #[test]
    fn summable_excess_is_difference_of_totals(
        lp in prop::collection::vec(positive(), 0..4),
        a in positive(),
        shrink in 1i64..=4,
        r in prop::sample::select(vec![q(1, 2), q(1, 3), q(3, 4)]),
    ) {
        let w = Work::default();
        let l = ExtendedSequence::positive(lp.clone(), TailSpec::geometric(a.clone(), r.clone())).unwrap();
        let c = q(shrink, 4);
        let dp: Vec<Q> = lp.iter().map(|x| x * &c).collect();
        let d = ExtendedSequence::positive(dp.clone(), TailSpec::geometric(&a * &c, r.clone())).unwrap();
        prop_assert!(lebesgue_majorizes(&l, &d, &w).holds());
        // totals from the closed form a/(1-r), computed here
        let total = |p: &[Q], first: &Q| p.iter().sum::<Q>() + first / (qi(1) - &r);
        let expected = total(&lp, &a) - total(&dp, &(&a * &c));
        let e = excess(&l, &d, &w);
        prop_assert_eq!(e.sigma_plus, CertifiedValue::Exact(expected));
    }

    #[test]
    fn nonsummable_over_summable_has_infinite_excess(c in positive(), lp in prop::collection::vec(positive(), 0..3)) {
        let w = Work::default();
        let l = ExtendedSequence::positive(lp, TailSpec::power(c + qi(4), 1, 0)).unwrap();
        let d = ExtendedSequence::positive(vec![], TailSpec::geometric(q(1, 2), q(1, 2))).unwrap();
        let r = riemann_majorizes(&l, &d, w.n_work, &w);
        if r.holds() {
            prop_assert_eq!(excess(&l, &d, &w).sigma_plus, CertifiedValue::PlusInfinity);
        }
    }
}

#[test]
fn zero_level_is_rejected() {
    let s = ExtendedSequence::from_terms(&[qi(1)]);
    assert!(delta(&qi(0), &s, &s, &Work::default()).is_err());
}
