use std::cmp::Ordering;

use proptest::prelude::*;
use rand::Rng;

use diagonals::cli::oracle::{random_extended_sequence, random_majorization_pair, rng};
use diagonals::construct::{schur_horn_build, verify_realization};
use diagonals::decision::{decide, decide_at, enumerate_splittings, CondStatus, CondWitness, Outcome, Verdict};
use diagonals::majorization::Witness;
use diagonals::seqcore::num::{q, qi};
use diagonals::seqcore::{ExtNat, ExtendedSequence, TailSpec, Q};

fn signed() -> impl Strategy<Value = Q> {
    (-12i64..=12, prop::sample::select(vec![1i64, 2, 4])).prop_map(|(n, d)| q(n, d))
}

/// Finite lists; half of the time `d` is an averaged copy of λ.
fn finite_pair() -> impl Strategy<Value = (Vec<Q>, Vec<Q>)> {
    (prop::collection::vec(signed(), 1..9), prop::collection::vec(signed(), 1..9), any::<u64>(), 0u8..3).prop_map(
        |(l, d, seed, mode)| match mode {
            0 => (l, d),
            1 => random_majorization_pair(&mut rng(seed), l.len()),
            _ => {
                let (l, mut d) = random_majorization_pair(&mut rng(seed), l.len());
                d[0] += q(1, 4);
                (l, d)
            }
        },
    )
}

/// Finite Schur–Horn: same length, equal trace, and sorted partial sums of
/// λ dominate those of d.
fn schur_horn(l: &[Q], d: &[Q]) -> bool {
    if l.len() != d.len() {
        return false;
    }
    let desc = |v: &[Q]| {
        let mut v = v.to_vec();
        v.sort_by(|a, b| b.cmp(a));
        v
    };
    let (l, d) = (desc(l), desc(d));
    let mut g = qi(0);
    for (a, b) in l.iter().zip(&d) {
        g += a - b;
        if g < qi(0) {
            return false;
        }
    }
    g == qi(0)
}

fn side_sorted(v: &[Q], negative: bool) -> Vec<Q> {
    let mut v: Vec<Q> = v.iter().filter(|x| if negative { **x < qi(0) } else { **x > qi(0) }).map(|x| if negative { -x } else { x.clone() }).collect();
    v.sort_by(|a, b| b.cmp(a));
    v
}

/// Re-checks a majorization witness on finite data by direct summation.
fn witness_is_valid(w: &Witness, l: &[Q], d: &[Q]) -> bool {
    match w {
        Witness::PartialSum { n, gap } => {
            let n = *n as usize;
            let s = |v: &[Q]| v.iter().take(n).sum::<Q>();
            let g = s(l) - s(d);
            g < qi(0) && gap.exact().is_none_or(|x| *x == g)
        }
        Witness::Level { alpha, delta } => {
            let e = |v: &[Q]| v.iter().filter(|x| *x >= alpha).map(|x| x - alpha).sum::<Q>();
            let g = e(l) - e(d);
            g < qi(0) && delta.exact().is_none_or(|x| *x == g)
        }
        Witness::Limit { limit } => limit.exact().is_some_and(|x| *x < qi(0)) && l.iter().sum::<Q>() < d.iter().sum::<Q>(),
    }
}

fn check_witnesses(v: &Verdict, l: &[Q], d: &[Q]) -> Result<(), String> {
    for (i, neg) in [(0, false), (1, true)] {
        let c = [&v.trace.p1, &v.trace.p2][i];
        if let CondStatus::Fails(CondWitness::Majorization(w)) = c {
            if !witness_is_valid(w, &side_sorted(l, neg), &side_sorted(d, neg)) {
                return Err(format!("invalid witness {w:?}"));
            }
        }
    }
    Ok(())
}

fn scaled_tail(t: &TailSpec, c: &Q) -> TailSpec {
    match t {
        TailSpec::Geometric { first, ratio } => TailSpec::geometric(first * c, ratio.clone()),
        TailSpec::Power { coef, exponent, offset } => TailSpec::power(coef * c, *exponent, *offset),
        other => other.clone(),
    }
}

fn shrunk(rng: &mut impl Rng, l: &ExtendedSequence) -> ExtendedSequence {
    let c = if rng.gen_bool(0.3) { qi(1) } else { q(rng.gen_range(1..=4), 4) };
    let prefix = l.prefix().iter().map(|x| x * &c).collect();
    let zeros = match l.zeros() {
        ExtNat::Fin(z) => ExtNat::Fin(rng.gen_range(0..=z)),
        ExtNat::Inf => [ExtNat::ZERO, ExtNat::Fin(1), ExtNat::Inf][rng.gen_range(0..3)],
    };
    ExtendedSequence::new(prefix, scaled_tail(l.pos_tail(), &c), scaled_tail(l.neg_tail(), &c), zeros).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn finite_lists_follow_schur_horn((l, d) in finite_pair()) {
        let v = decide(&ExtendedSequence::from_terms(&l), &ExtendedSequence::from_terms(&d));
        let expected = if schur_horn(&l, &d) { Outcome::Diagonal } else { Outcome::NotDiagonal };
        prop_assert_eq!(v.outcome, expected, "{}", v.to_text());
        if let Err(e) = check_witnesses(&v, &l, &d) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn diagonal_verdicts_are_realized(seed in any::<u64>(), dim in 1usize..8) {
        let (l, d) = random_majorization_pair(&mut rng(seed), dim);
        let v = decide(&ExtendedSequence::from_terms(&l), &ExtendedSequence::from_terms(&d));
        prop_assert_eq!(v.outcome, Outcome::Diagonal);
        let m = schur_horn_build(&l, &d).unwrap();
        prop_assert!(verify_realization(&m, &l, &d, 1e-9).unwrap().within(1e-9));
    }
}

#[test]
fn excess_order_is_never_refuted_for_diagonals() {
    let mut r = rng(11);
    let mut diagonals = 0;
    for i in 0..120 {
        let l = random_extended_sequence(&mut r);
        let d = if i % 2 == 0 { random_extended_sequence(&mut r) } else { shrunk(&mut r, &l) };
        let v = decide(&l, &d);
        if v.outcome != Outcome::Diagonal {
            continue;
        }
        diagonals += 1;
        let e = &v.trace.excess;
        if d.pos().is_summable() {
            assert_ne!(e.sigma_minus.compare(&e.sigma_plus), Some(Ordering::Less), "pair {i}: {e:?}");
        }
        if d.neg().is_summable() {
            assert_ne!(e.sigma_plus.compare(&e.sigma_minus), Some(Ordering::Less), "pair {i}: {e:?}");
        }
    }
    assert!(diagonals > 10, "only {diagonals} diagonal pairs");
}

#[test]
fn mirror_and_precision_on_a_few_pairs() {
    let mut r = rng(5);
    for i in 0..30 {
        let l = random_extended_sequence(&mut r);
        let d = if i % 2 == 0 { random_extended_sequence(&mut r) } else { shrunk(&mut r, &l) };
        let v = decide(&l, &d);
        let m = decide(&l.negated(), &d.negated());
        assert_eq!(v.outcome, m.outcome, "pair {i}");
        let e = m.trace.excess.mirrored();
        assert!(e.sigma_plus.intersect(&v.trace.excess.sigma_plus).is_some(), "pair {i}");
        assert!(e.sigma_minus.intersect(&v.trace.excess.sigma_minus).is_some(), "pair {i}");
        // a definite answer at one level stays the same at every higher level
        let mut settled: Option<Outcome> = None;
        for level in 1..=3 {
            let o = decide_at(&l, &d, level).outcome;
            if let Some(s) = settled {
                assert_eq!(o, s, "pair {i} level {level}");
            }
            if o != Outcome::PrecisionUnknown {
                settled = Some(o);
            }
        }
    }
}

#[test]
fn splittings_account_for_every_zero() {
    for (lz, dz) in [(0u64, 0u64), (3, 0), (5, 2), (4, 4)] {
        let l = ExtendedSequence::new(vec![qi(1)], Default::default(), Default::default(), ExtNat::Fin(lz)).unwrap();
        let d = ExtendedSequence::new(vec![qi(1)], Default::default(), Default::default(), ExtNat::Fin(dz)).unwrap();
        let s = enumerate_splittings(&l, &d);
        assert_eq!(s.len() as u64, lz - dz + 1);
        for sp in s {
            assert_eq!(sp.z1 + sp.z2 + ExtNat::Fin(dz), ExtNat::Fin(lz));
        }
    }
    let inf = |z| ExtendedSequence::new(vec![qi(1)], Default::default(), Default::default(), z).unwrap();
    let s = enumerate_splittings(&inf(ExtNat::Inf), &inf(ExtNat::Fin(2)));
    assert!(s.iter().all(|sp| sp.z1 + sp.z2 == ExtNat::Inf));
}

#[test]
fn zero_excess_examines_splittings() {
    // λ and d with equal positive and negative parts: both excesses vanish
    let l = ExtendedSequence::from_terms(&[qi(1), qi(-1), qi(0)]);
    let v = decide(&l, &l);
    assert_eq!(v.outcome, Outcome::Diagonal);
    assert!(!v.splittings_examined.is_empty());
    // one zero short on the diagonal side: dimensions differ
    let d = ExtendedSequence::from_terms(&[qi(1), qi(-1)]);
    let v = decide(&l, &d);
    assert_eq!(v.outcome, Outcome::NotDiagonal);
    // a full set of zero diagonal entries is realized by a rotated 2×2 block
    let d = ExtendedSequence::from_terms(&[qi(0), qi(0), qi(0)]);
    assert_eq!(decide(&l, &d).outcome, Outcome::Diagonal);
}
