//! Randomized property suites behind `diagonals oracle`, and the instance
//! generators they use.

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{pretty, CmdOutput, Format, EXIT_INPUT, EXIT_VIOLATION, RESIDUAL_TOL};
use crate::construct::{
    convmove, convmove_holds, exequal_transform, fis_transform, fiz_transform, midseq_transform, one_neg_transform,
    schur_horn_build, verify_realization, MidseqCase,
};
use crate::majorization::lr_equivalence_check;
use crate::seqcore::num::{q, qu};
use crate::seqcore::{ExtNat, ExtendedSequence, Side, TailSpec, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    LrEquivalence,
    SchurHornRoundtrip,
    TransformerPostconditions,
}

impl OracleKind {
    pub fn parse(s: &str) -> Option<OracleKind> {
        match s {
            "lr-equivalence" => Some(OracleKind::LrEquivalence),
            "schur-horn-roundtrip" => Some(OracleKind::SchurHornRoundtrip),
            "transformer-postconditions" => Some(OracleKind::TransformerPostconditions),
            _ => None,
        }
    }
}

/// Names accepted by the transformer suite.
pub const TRANSFORMERS: [&str; 8] = ["convmove", "midseq", "midseq-case1", "midseq-case2", "fis", "fiz", "exequal", "one-neg"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleParams {
    pub seed: u64,
    /// Number of pairs for the equivalence suite.
    pub n: usize,
    pub dim: usize,
    pub trials: usize,
    /// Transformer name, or `all`.
    pub transform: String,
}

impl Default for OracleParams {
    fn default() -> Self {
        OracleParams { seed: 1, n: 200, dim: 8, trials: 100, transform: "all".into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub violations: Vec<String>,
    pub max_residual: Option<f64>,
}

impl SuiteReport {
    fn new(name: &str) -> SuiteReport {
        SuiteReport { name: name.into(), ..Default::default() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    fn record(&mut self, r: Result<(), String>) {
        self.trials += 1;
        if let Err(e) = r {
            self.violations.push(format!("trial {}: {e}", self.trials));
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "max_residual": self.max_residual,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}: {} trials, {} violations", self.name, self.trials, self.violations.len());
        if let Some(r) = self.max_residual {
            s.push_str(&format!(", max residual {r:e}"));
        }
        s.push('\n');
        for v in self.violations.iter().take(20) {
            s.push_str(&format!("  {v}\n"));
        }
        s
    }
}

/// Runs a suite; exit 0 when every trial passes.
pub fn cmd_oracle(kind: &str, params: &OracleParams, format: Format) -> CmdOutput {
    let Some(k) = OracleKind::parse(kind) else {
        return CmdOutput::new(EXIT_INPUT, format!("unknown oracle kind `{kind}`\n"));
    };
    let reports = match k {
        OracleKind::LrEquivalence => vec![lr_suite(params.seed, params.n)],
        OracleKind::SchurHornRoundtrip => vec![schur_horn_suite(params.seed, params.dim, params.trials)],
        OracleKind::TransformerPostconditions => {
            let names: Vec<&str> = if params.transform == "all" {
                vec!["convmove", "midseq-case1", "midseq-case2", "fis", "fiz", "exequal", "one-neg"]
            } else if TRANSFORMERS.contains(&params.transform.as_str()) {
                vec![params.transform.as_str()]
            } else {
                return CmdOutput::new(EXIT_INPUT, format!("unknown transformer `{}`\n", params.transform));
            };
            names.iter().map(|n| transformer_suite(params.seed, n, params.trials)).collect()
        }
    };
    let ok = reports.iter().all(SuiteReport::passed);
    let report = match format {
        Format::Json => pretty(&json!({"oracle": kind, "passed": ok, "suites": reports.iter().map(SuiteReport::to_json).collect::<Vec<_>>()})),
        Format::Text => reports.iter().map(SuiteReport::to_text).collect(),
    };
    CmdOutput::new(if ok { 0 } else { EXIT_VIOLATION }, report)
}

// ---------------------------------------------------------------------------
// generators

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `0 ≤ p ≤ max_num` and a small denominator.
pub fn random_rational(rng: &mut impl Rng, max_num: i64) -> Q {
    let den = [1, 2, 3, 4, 5, 6, 8][rng.gen_range(0..7)];
    q(rng.gen_range(0..=max_num), den)
}

/// Uniform on `(0, 1]` in steps of `1/den`.
fn unit(rng: &mut impl Rng, den: i64) -> Q {
    q(rng.gen_range(1..=den), den)
}

fn sorted_desc(mut v: Vec<Q>) -> Vec<Q> {
    v.sort_by(|a, b| b.cmp(a));
    v
}

/// Finitely supported nonnegative pair, lengths ≤ 30. Half of the pairs are
/// built so that λ majorizes d.
pub fn random_finite_pair(rng: &mut impl Rng) -> (Vec<Q>, Vec<Q>) {
    let n = rng.gen_range(0..=30);
    let l: Vec<Q> = (0..n).map(|_| random_rational(rng, 12)).collect();
    let d: Vec<Q> = if rng.gen_bool(0.5) {
        sorted_desc(l.clone()).iter().map(|x| x * unit(rng, 4)).collect()
    } else {
        (0..rng.gen_range(0..=30)).map(|_| random_rational(rng, 12)).collect()
    };
    (l, d)
}

/// Pair `(λ, d)` with `d ≼ λ`: `d` is obtained from λ by random exact
/// averaging moves and then shuffled.
pub fn random_majorization_pair(rng: &mut impl Rng, dim: usize) -> (Vec<Q>, Vec<Q>) {
    let l: Vec<Q> = (0..dim).map(|_| random_rational(rng, 16) - qu(4)).collect();
    let mut d = l.clone();
    if dim >= 2 {
        for _ in 0..2 * dim {
            let i = rng.gen_range(0..dim);
            let mut j = rng.gen_range(0..dim - 1);
            if j >= i {
                j += 1;
            }
            let t = q(rng.gen_range(0..=8), 8);
            let (a, b) = (d[i].clone(), d[j].clone());
            d[i] = &t * &a + (Q::from_integer(1.into()) - &t) * &b;
            d[j] = &a + &b - &d[i];
        }
    }
    d.shuffle(rng);
    (l, d)
}

fn ratio(rng: &mut impl Rng) -> Q {
    [q(1, 2), q(1, 3), q(2, 3), q(3, 4)][rng.gen_range(0..4)].clone()
}

/// `d` with prefix in `[lo, lo + 3]` and a geometric tail below it, and λ
/// dominating it termwise with excess `e` on the prefix.
fn dominated_pair(rng: &mut impl Rng, lo: Q, tail_gap: Option<Q>, total: Option<&Q>) -> (Side, Side, Vec<Q>) {
    let k = rng.gen_range(0..=4);
    let dpre = sorted_desc((0..k).map(|_| &lo + random_rational(rng, 3)).collect());
    let mut e: Vec<Q> = (0..k).map(|_| if rng.gen_bool(0.3) { Q::zero() } else { unit(rng, 4) }).collect();
    if let Some(t) = total {
        // keep the prefix excess below half of the target total
        e = e.iter().map(|x| x * t / qu(2 * (k as u64).max(1))).collect();
    }
    let lpre = sorted_desc(dpre.iter().zip(&e).map(|(a, b)| a + b).collect());
    let r = ratio(rng);
    let b = q(1, 4) * unit(rng, 4);
    let a = match (&tail_gap, total) {
        (_, Some(t)) => {
            let rest = t - e.iter().sum::<Q>();
            &b + rest * (Q::from_integer(1.into()) - &r)
        }
        (Some(g), None) => &b + g,
        (None, None) => b.clone(),
    };
    let l = Side::new(lpre, TailSpec::geometric(a, r.clone()));
    let d = Side::new(dpre, TailSpec::geometric(b, r));
    (l, d, e)
}

/// A random sequence with prefix, tails and zero count drawn from small
/// families, for metamorphic tests.
pub fn random_extended_sequence(rng: &mut impl Rng) -> ExtendedSequence {
    let k = rng.gen_range(0..=4);
    let prefix: Vec<Q> = (0..k)
        .map(|_| {
            let x = random_rational(rng, 8) + q(1, 8);
            if rng.gen_bool(0.4) {
                -x
            } else {
                x
            }
        })
        .collect();
    let tail = |rng: &mut ChaCha8Rng| -> TailSpec {
        match rng.gen_range(0..4) {
            0 => TailSpec::Zero,
            1 | 2 => TailSpec::geometric(q(1, 2) * unit(rng, 4), ratio(rng)),
            _ => TailSpec::power(unit(rng, 2), rng.gen_range(1..=2), rng.gen_range(0..=2)),
        }
    };
    let mut inner = ChaCha8Rng::seed_from_u64(rng.gen());
    let pt = tail(&mut inner);
    let nt = tail(&mut inner);
    let zeros = match rng.gen_range(0..6) {
        0 => ExtNat::Inf,
        1 => ExtNat::Fin(1),
        _ => ExtNat::ZERO,
    };
    ExtendedSequence::new(prefix, pt, nt, zeros).expect("generated sequence is valid")
}

// ---------------------------------------------------------------------------
// suites

pub fn lr_suite(seed: u64, n: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut rep = SuiteReport::new("lr-equivalence");
    for _ in 0..n {
        let (l, d) = random_finite_pair(&mut rng);
        let r = lr_equivalence_check(&l, &d);
        rep.record(if r.consistent() { Ok(()) } else { Err(format!("{r:?}")) });
    }
    rep
}

pub fn schur_horn_suite(seed: u64, dim: usize, trials: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut rep = SuiteReport::new(&format!("schur-horn-roundtrip dim={dim}"));
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (l, d) = random_majorization_pair(&mut rng, dim);
        let r = schur_horn_build(&l, &d)
            .map_err(|e| e.to_string())
            .and_then(|m| verify_realization(&m, &l, &d, RESIDUAL_TOL).map_err(|e| e.to_string()))
            .and_then(|r| {
                worst = worst.max(r.eigen_residual).max(r.diagonal_residual);
                if r.within(RESIDUAL_TOL) {
                    Ok(())
                } else {
                    Err(format!("residuals {:e}, {:e}", r.eigen_residual, r.diagonal_residual))
                }
            });
        rep.record(r);
    }
    rep.max_residual = Some(worst);
    rep
}

pub fn transformer_suite(seed: u64, name: &str, trials: usize) -> SuiteReport {
    let mut rng = rng(seed);
    let mut rep = SuiteReport::new(name);
    for _ in 0..trials {
        let r = match name {
            "convmove" => convmove_trial(&mut rng),
            "midseq" => {
                let case_two = rng.gen_bool(0.5);
                midseq_trial(&mut rng, case_two)
            }
            "midseq-case1" => midseq_trial(&mut rng, false),
            "midseq-case2" => midseq_trial(&mut rng, true),
            "fis" => fis_trial(&mut rng),
            "fiz" => fiz_trial(&mut rng),
            "exequal" => exequal_trial(&mut rng),
            "one-neg" => one_neg_trial(&mut rng),
            other => Err(format!("unknown transformer `{other}`")),
        };
        rep.record(r);
    }
    rep
}

fn convmove_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(1..=8);
    let l = sorted_desc((0..n).map(|_| random_rational(rng, 12)).collect());
    let delta = (&l[0] - &l[n - 1]) * q(rng.gen_range(0..=8), 8);
    let out = convmove(&l, &delta).map_err(|e| e.to_string())?;
    if !convmove_holds(&l, &out) {
        return Err("partial sums of λ - λ̃↓ negative".into());
    }
    if out.iter().sum::<Q>() != l.iter().sum::<Q>() {
        return Err("sum changed".into());
    }
    Ok(())
}

fn midseq_trial(rng: &mut ChaCha8Rng, case_two: bool) -> Result<(), String> {
    let (l, d) = if case_two {
        let gap = q(1, 8) * unit(rng, 4);
        let (l, d, _) = dominated_pair(rng, Q::from_integer(1.into()), Some(gap), None);
        (l, d)
    } else {
        // equal tails, so the excess sits in the prefix and must be positive
        let (mut l, d, s) = loop {
            let (l, d, e) = dominated_pair(rng, Q::from_integer(1.into()), None, None);
            let s: Q = e.iter().sum();
            if s.is_positive() {
                break (l, d, s);
            }
        };
        if rng.gen_bool(0.5) {
            // a smaller λ tail: partial sums decrease towards the limit
            if let TailSpec::Geometric { first, ratio } = &l.tail {
                let cut = &s * (Q::from_integer(1.into()) - ratio) / qu(4);
                let cut = if &cut < first { cut } else { first / qu(2) };
                l = Side::new(l.prefix.clone(), TailSpec::geometric(first - cut, ratio.clone()));
            }
        }
        (l, d)
    };
    let p = midseq_transform(&l, &d, 6).map_err(|e| e.to_string())?;
    if matches!(p.case, MidseqCase::Two { .. }) != case_two {
        return Err(format!("expected case {}, got the other", if case_two { 2 } else { 1 }));
    }
    p.verify()
}

fn fis_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let k = rng.gen_range(0..=4);
    let pre = sorted_desc((0..k).map(|_| Q::from_integer(1.into()) + random_rational(rng, 3)).collect());
    let l = Side::new(pre, TailSpec::geometric(q(1, 2) * unit(rng, 4), ratio(rng)));
    let n = rng.gen_range(1..=4);
    let d = sorted_desc((1..=n as u64).map(|i| l.term(i) * unit(rng, 4)).collect());
    let p = fis_transform(&l, &d).map_err(|e| e.to_string())?;
    p.verify()
}

fn fiz_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let k = rng.gen_range(0..=5);
    let prefix: Vec<Q> = (0..k)
        .map(|_| {
            let x = random_rational(rng, 8) + q(1, 8);
            if rng.gen_bool(0.5) {
                -x
            } else {
                x
            }
        })
        .collect();
    let lam = ExtendedSequence::new(
        prefix,
        TailSpec::geometric(unit(rng, 4), ratio(rng)),
        TailSpec::geometric(unit(rng, 4), ratio(rng)),
        ExtNat::ZERO,
    )
    .map_err(|e| e.to_string())?;
    let m = rng.gen_range(0..=4);
    let p = fiz_transform(&lam, m).map_err(|e| e.to_string())?;
    p.verify(m)
}

fn exequal_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let gap = q(1, 8) * unit(rng, 4);
    let (lp, dp, e) = dominated_pair(rng, Q::from_integer(1.into()), Some(gap.clone()), None);
    let r = match &lp.tail {
        TailSpec::Geometric { ratio, .. } => ratio.clone(),
        _ => unreachable!(),
    };
    let sigma = e.iter().sum::<Q>() + gap / (Q::from_integer(1.into()) - r);
    let (ln, dn, _) = dominated_pair(rng, Q::from_integer(3.into()) + &sigma, None, Some(&sigma));
    let p = exequal_transform(&lp, &ln, &dp, &dn, 8).map_err(|e| e.to_string())?;
    p.verify()
}

fn one_neg_trial(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let gap = q(1, 8) * unit(rng, 4);
        let (l, d, _) = dominated_pair(rng, Q::from_integer(1.into()), Some(gap), None);
    let p = one_neg_transform(&l, &d, 6).map_err(|e| e.to_string())?;
    p.verify()
}
