//! Exact sequence transformers. Each one returns a plan whose `verify`
//! re-checks the defining identities and inequalities in rational arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::ConstructError;
use crate::majorization::{gap_limit, regime, riemann_sides, Status};
use crate::seqcore::num::{floor, fmt_q, pow, q, qu};
use crate::seqcore::{CertifiedValue, ExtNat, ExtendedSequence, Side, Work, Q};

/// Largest window any transformer materializes.
pub const WINDOW_CAP: u64 = 200_000;

/// `x ≼ y` for finite lists: equal sums and dominated sorted partial sums.
pub fn finite_majorized(x: &[Q], y: &[Q]) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.cmp(a));
    ys.sort_by(|a, b| b.cmp(a));
    let (mut sx, mut sy) = (Q::zero(), Q::zero());
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if sx > sy {
            return false;
        }
    }
    sx == sy
}

fn nonincreasing(v: &[Q]) -> bool {
    v.windows(2).all(|w| w[0] >= w[1])
}

fn ensure(cond: bool, what: &str, errs: &mut Vec<String>) {
    if !cond {
        errs.push(what.to_string());
    }
}

fn finish(errs: Vec<String>) -> Result<(), String> {
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs.join("; "))
    }
}

fn qjson(v: &[Q]) -> Value {
    Value::from(v.iter().map(fmt_q).collect::<Vec<_>>())
}

// ---------------------------------------------------------------------------
// convmove

/// Moves `Δ` from the first entry to the last of a nonincreasing list.
pub fn convmove(lambda: &[Q], delta: &Q) -> Result<Vec<Q>, ConstructError> {
    if lambda.is_empty() || !nonincreasing(lambda) {
        return Err(ConstructError::Parameter("list must be nonempty and nonincreasing".into()));
    }
    let n = lambda.len();
    let span = &lambda[0] - &lambda[n - 1];
    if delta.is_negative() || delta > &span {
        return Err(ConstructError::Parameter(format!("Δ = {} outside [0, {}]", fmt_q(delta), fmt_q(&span))));
    }
    let mut out = lambda.to_vec();
    if n == 1 {
        return Ok(out);
    }
    out[0] -= delta;
    out[n - 1] += delta;
    Ok(out)
}

/// `Σ_{i≤k} (λ_i - λ̃↓_i) ≥ 0` for every `k`.
pub fn convmove_holds(lambda: &[Q], out: &[Q]) -> bool {
    let mut sorted = out.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    let mut s = Q::zero();
    lambda.iter().zip(&sorted).all(|(a, b)| {
        s += a - b;
        !s.is_negative()
    })
}

// ---------------------------------------------------------------------------
// helpers on sides

/// Pointwise `λ_i ≥ d_i`, certified through the eventual sign pattern.
/// Returns whether `λ_i > d_i` for all large `i`.
fn check_dominance(l: &Side, d: &Side, work: &Work) -> Result<bool, ConstructError> {
    let r = regime(l, d, work).ok_or_else(|| ConstructError::Unsupported("interleaved tail families".into()))?;
    let upto = r.k0.max(r.start) + 1;
    if upto > WINDOW_CAP {
        return Err(ConstructError::Window(upto));
    }
    for (k, (a, b)) in l.iter().zip(d.iter().chain(std::iter::repeat(Q::zero()))).take(upto as usize).enumerate() {
        if a < b {
            return Err(ConstructError::Dominance { index: k as u64 + 1 });
        }
    }
    if l.prefix_len().max(d.prefix_len()) >= upto && l.len().finite().is_some() {
        return Ok(false);
    }
    match r.after {
        Ordering::Less => Err(ConstructError::Dominance { index: r.k0 }),
        Ordering::Greater => Ok(true),
        Ordering::Equal => Ok(false),
    }
}

fn window(s: &Side, n: u64) -> Vec<Q> {
    (1..=n).map(|k| s.term(k)).collect()
}

fn exact_sigma(l: &Side, d: &Side, work: &Work) -> Result<Q, ConstructError> {
    match gap_limit(l, d, work) {
        CertifiedValue::Exact(s) if s.is_positive() => Ok(s),
        CertifiedValue::Exact(_) => Err(ConstructError::Parameter("excess is zero".into())),
        CertifiedValue::PlusInfinity => Err(ConstructError::Parameter("excess is infinite".into())),
        other => Err(ConstructError::Parameter(format!("excess {} is not an exact positive rational", other.render()))),
    }
}

// ---------------------------------------------------------------------------
// one negative term

/// Perturbation that makes a termwise-dominating positive sequence satisfy the
/// linear bound `λ̃_n ≤ C t_{n+1}`: `λ̃_{n0} = λ_{n0} - α`, `λ̃_i = λ_i + α γ_i`
/// for `i > n0`, where `γ` is constant on the blocks `(n_{k-1}, n_k]` and has
/// total mass one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneNegPlan {
    pub n0: u64,
    pub alpha: Q,
    /// Cut points `n_0 < n_1 < … < n_K`.
    pub cuts: Vec<u64>,
    /// `γ_i` for `n0 < i ≤ n_K`.
    pub gamma: Vec<Q>,
    pub lambda: Vec<Q>,
    pub d: Vec<Q>,
    pub lambda_tilde: Vec<Q>,
    /// `C₁ = 2 max(1, λ_{n0+1})/α + 1`.
    pub c1: Q,
}

pub fn one_neg_transform(lambda: &Side, d: &Side, blocks: usize) -> Result<OneNegPlan, ConstructError> {
    let work = Work::default();
    check_dominance(lambda, d, &work)?;
    exact_sigma(lambda, d, &work)?;
    let scan = (lambda.prefix_len().max(d.prefix_len()) + 64).min(WINDOW_CAP);
    let n0 = (1..=scan)
        .find(|&n| lambda.term(n) > d.term(n) && lambda.term(n) > lambda.term(n + 1))
        .ok_or_else(|| ConstructError::Parameter("no index with λ_n > d_n and λ_n > λ_{n+1} in the window".into()))?;
    let mut cuts = vec![n0];
    for k in 1..=blocks as u64 {
        let level = pow(&q(1, 2), k);
        // smallest n with λ_{n+1} < 2^-k is the number of terms ≥ 2^-k
        let need = lambda.count_ge(&level);
        let last = cuts[cuts.len() - 1];
        let spread = if cuts.len() >= 2 { 2 * last - cuts[cuts.len() - 2] + 1 } else { last + 1 };
        let nk = need.max(spread);
        if nk > WINDOW_CAP {
            return Err(ConstructError::Window(nk));
        }
        cuts.push(nk);
    }
    let mut gamma = Vec::new();
    for k in 1..cuts.len() {
        let g = pow(&q(1, 2), k as u64) / qu(cuts[k] - cuts[k - 1]);
        for _ in cuts[k - 1]..cuts[k] {
            gamma.push(g.clone());
        }
    }
    let end = *cuts.last().unwrap();
    let lw = window(lambda, end + 1);
    let dw = window(d, end + 1);
    let i0 = (n0 - 1) as usize;
    let room = (&lw[i0] - &dw[i0]).min(&lw[i0] - &lw[i0 + 1]);
    let alpha = room / qu(2);
    let mut lt = lw[..end as usize].to_vec();
    lt[i0] -= &alpha;
    for (j, g) in gamma.iter().enumerate() {
        lt[i0 + 1 + j] += &alpha * g;
    }
    // The terms after n0 are below max(1, λ_{n0+1}) on the first block and below 2^{1-k} on block k.
    let scale = lw[i0 + 1].clone().max(Q::one());
    let c1 = qu(2) * scale / &alpha + Q::one();
    Ok(OneNegPlan { n0, alpha, cuts, gamma, lambda: lw[..end as usize].to_vec(), d: dw[..end as usize].to_vec(), lambda_tilde: lt, c1 })
}

impl OneNegPlan {
    pub fn verify(&self) -> Result<(), String> {
        let mut errs = Vec::new();
        let lt = &self.lambda_tilde;
        ensure(nonincreasing(lt), "λ̃ is not nonincreasing", &mut errs);
        ensure(lt.iter().zip(&self.d).all(|(a, b)| a >= b), "λ̃_i < d_i somewhere", &mut errs);
        let mut s = Q::zero();
        for (k, (a, b)) in self.lambda.iter().zip(lt).enumerate() {
            s += a - b;
            if s.is_negative() {
                errs.push(format!("partial sum of λ - λ̃ negative at {}", k + 1));
                break;
            }
        }
        // At the last cut the partial sum equals α 2^-K, which tends to zero.
        let kk = (self.cuts.len() - 1) as u64;
        ensure(s == &self.alpha * pow(&q(1, 2), kk), "partial sums of λ - λ̃ do not shrink as 2^-k", &mut errs);
        // On block k, t_{n+1} ≥ α 2^-k, so λ̃_n ≤ C₁ α 2^-k gives λ̃_n ≤ C₁ t_{n+1}.
        for k in 1..self.cuts.len() {
            let cap = &self.c1 * &self.alpha * pow(&q(1, 2), k as u64);
            for n in (self.cuts[k - 1] + 1)..=self.cuts[k] {
                if lt[(n - 1) as usize] > cap {
                    errs.push(format!("linear bound fails at n = {n}"));
                    break;
                }
            }
        }
        finish(errs)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "one_neg",
            "n0": self.n0,
            "alpha": fmt_q(&self.alpha),
            "cuts": self.cuts,
            "c1": fmt_q(&self.c1),
            "lambda_tilde": qjson(&self.lambda_tilde),
        })
    }
}

// ---------------------------------------------------------------------------
// midseq

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MidseqCase {
    /// Finitely many partial sums below the limit.
    One { m: u64, z: u64, n: u64, alpha: Q, beta: Q },
    /// Infinitely many: markers `m_j` and cut points `N_j`.
    Two { markers: Vec<u64>, cuts: Vec<u64> },
}

/// Replacement of λ by a sequence between λ and d that carries the limit of
/// the partial-sum gaps as its total excess over d.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MidseqPlan {
    pub case: MidseqCase,
    pub sigma: Q,
    pub lambda: Vec<Q>,
    pub d: Vec<Q>,
    /// Before the final strictness modification.
    pub lambda_mid: Vec<Q>,
    pub i0: u64,
    pub epsilon: Q,
    /// Final sequence on the window; beyond it `λ̃_i = (mid)_i + 2^{i0-i} ε`.
    pub lambda_tilde: Vec<Q>,
}

fn deltas(l: &[Q], d: &[Q]) -> Vec<Q> {
    let mut out = Vec::with_capacity(l.len() + 1);
    let mut s = Q::zero();
    out.push(s.clone());
    for (a, b) in l.iter().zip(d) {
        s += a - b;
        out.push(s.clone());
    }
    out
}

pub fn midseq_transform(lambda: &Side, d: &Side, markers: usize) -> Result<MidseqPlan, ConstructError> {
    let work = Work::default();
    match riemann_sides(lambda, d, work.n_work, &work) {
        Status::Holds => {}
        Status::Fails(_) => return Err(ConstructError::Parameter("partial sums of λ - d are not all nonnegative".into())),
        Status::Unknown(why) => return Err(ConstructError::Unsupported(why)),
    }
    let sigma = exact_sigma(lambda, d, &work)?;
    let r = regime(lambda, d, &work).ok_or_else(|| ConstructError::Unsupported("interleaved tail families".into()))?;
    // Beyond `mono`, δ_k is monotone (or constant) towards σ.
    let mono = match r.after {
        Ordering::Equal => r.start.saturating_sub(1),
        _ => r.k0.saturating_sub(1),
    };
    let infinitely_below = r.after == Ordering::Greater;
    let (case, mid, lw, dw) = if !infinitely_below {
        let lw0 = window(lambda, mono + 1);
        let dw0 = window(d, mono + 1);
        let dl = deltas(&lw0, &dw0);
        let m = (1..=mono).filter(|&k| dl[k as usize] < sigma).max().unwrap_or(0);
        let z = (1..=mono).filter(|&k| dl[k as usize].is_zero()).max().unwrap_or(0);
        let d_at = |k: u64| if k == 0 { lambda.term(1) + Q::one() } else { d.term(k) };
        let alpha = d_at(z) - d_at(z + 1);
        let mut beta = sigma.clone();
        for k in (z + 1)..=mono {
            if dl[k as usize] < beta {
                beta = dl[k as usize].clone();
            }
        }
        // smallest N > M with Nα > σ and Nβ > Mσ
        let n1 = floor(&(&sigma / &alpha)) + BigInt::one();
        let n2 = floor(&(qu(m) * &sigma / &beta)) + BigInt::one();
        let n = n1.max(n2).max(BigInt::from(m + 1));
        let n: u64 = n.try_into().map_err(|_| ConstructError::Window(u64::MAX))?;
        let end = z + n + 1;
        if end > WINDOW_CAP {
            return Err(ConstructError::Window(end));
        }
        let lw = window(lambda, end + 1);
        let dw = window(d, end + 1);
        let step = &sigma / qu(n);
        let mut mid = dw.clone();
        for i in (z + 1)..=(z + n) {
            mid[(i - 1) as usize] += &step;
        }
        (MidseqCase::One { m, z, n, alpha, beta }, mid, lw, dw)
    } else {
        let mut cap = (mono + 2).max(16);
        let (markers_v, cuts) = loop {
            let lw0 = window(lambda, cap);
            let dw0 = window(d, cap);
            let dl = deltas(&lw0, &dw0);
            let mut ms = vec![0u64];
            let mut ok = true;
            for _ in 0..markers {
                let prev = *ms.last().unwrap();
                let hi = (prev + 1).max(mono);
                if hi as usize >= dl.len() {
                    ok = false;
                    break;
                }
                let mut best = prev + 1;
                for k in (prev + 1)..=hi {
                    if dl[k as usize] <= dl[best as usize] {
                        best = k;
                    }
                }
                ms.push(best);
            }
            if ok {
                let mut cuts = vec![0u64, ms[1]];
                let mut slope_prev = &dl[ms[1] as usize] / qu(ms[1]);
                for j in 2..=markers {
                    let inc = &dl[ms[j] as usize] - &dl[ms[j - 1] as usize];
                    let np = cuts[j - 1];
                    // A zero first slope (δ vanishes at m_1) is followed by one
                    // below the drop of d at the cut, which is positive there.
                    let bound = if slope_prev.is_zero() { d.term(np) - d.term(np + 1) } else { slope_prev.clone() };
                    if !bound.is_positive() {
                        return Err(ConstructError::Parameter(format!("d does not drop after the last zero of δ at {np}")));
                    }
                    let need: u64 = (floor(&(&inc / &bound)) + BigInt::one()).try_into().unwrap_or(u64::MAX);
                    let nj = (np + 1).max(ms[j]).max(np.saturating_add(need));
                    if nj > WINDOW_CAP {
                        return Err(ConstructError::Window(nj));
                    }
                    slope_prev = inc / qu(nj - np);
                    cuts.push(nj);
                }
                break (ms, cuts);
            }
            cap *= 2;
            if cap > WINDOW_CAP {
                return Err(ConstructError::Window(cap));
            }
        };
        let end = *cuts.last().unwrap();
        let lw = window(lambda, end + 1);
        let dw = window(d, end + 1);
        let dl = deltas(&lw, &dw);
        let mut mid = dw.clone();
        for j in 1..cuts.len() {
            let slope = (&dl[markers_v[j] as usize] - &dl[markers_v[j - 1] as usize]) / qu(cuts[j] - cuts[j - 1]);
            for i in (cuts[j - 1] + 1)..=cuts[j] {
                mid[(i - 1) as usize] += &slope;
            }
        }
        // the entry just past the window is d_{end+1}; keep the window to the cuts
        mid.truncate(end as usize);
        let mut lw = lw;
        let mut dw = dw;
        lw.truncate(end as usize);
        dw.truncate(end as usize);
        (MidseqCase::Two { markers: markers_v, cuts }, mid, lw, dw)
    };
    // Strictness modification at the first index where the sequence drops.
    let last = mid.len();
    let i0 = (1..last)
        .find(|&i| mid[i - 1] > dw[i - 1] && mid[i - 1] > mid[i])
        .ok_or_else(|| ConstructError::Parameter("no strict drop in the window".into()))?;
    let epsilon = (&mid[i0 - 1] - &dw[i0 - 1]).min((&mid[i0 - 1] - &mid[i0]) / qu(2));
    let mut lt = mid.clone();
    lt[i0 - 1] -= &epsilon;
    for i in (i0 + 1)..=last {
        lt[i - 1] += &epsilon * pow(&q(1, 2), (i - i0) as u64);
    }
    Ok(MidseqPlan { case, sigma, lambda: lw, d: dw, lambda_mid: mid, i0: i0 as u64, epsilon, lambda_tilde: lt })
}

impl MidseqPlan {
    pub fn verify(&self) -> Result<(), String> {
        let mut errs = Vec::new();
        let (lt, d, l) = (&self.lambda_tilde, &self.d, &self.lambda);
        let w = lt.len();
        ensure(nonincreasing(lt), "λ̃ is not nonincreasing", &mut errs);
        ensure(lt.iter().zip(d).all(|(a, b)| a >= b), "λ̃_i < d_i somewhere", &mut errs);
        ensure(
            lt.iter().zip(d).skip(self.i0 as usize).all(|(a, b)| a > b),
            "λ̃_i = d_i after the modification index",
            &mut errs,
        );
        let mut s = Q::zero();
        for (k, (a, b)) in l.iter().zip(lt).enumerate() {
            s += a - b;
            if s.is_negative() {
                errs.push(format!("Σ(λ - λ̃) negative at k = {}", k + 1));
                break;
            }
        }
        let tail_geo = &self.epsilon * pow(&q(1, 2), (w as u64) - self.i0);
        let excess: Q = lt.iter().zip(d).map(|(a, b)| a - b).sum();
        match &self.case {
            MidseqCase::One { z, n, .. } => {
                // beyond the window λ̃ - d is the geometric remainder only
                ensure(w as u64 > z + n, "window does not cover the modified block", &mut errs);
                ensure(&excess + &tail_geo == self.sigma, "total excess differs from σ", &mut errs);
                // Σ_{i≤k}(λ - λ̃) = δ_k - σ + ε 2^{i0-k} there, and δ_k → σ.
                let dl: Q = l.iter().zip(d).map(|(a, b)| a - b).sum();
                ensure(s == dl - &self.sigma + &tail_geo, "partial-sum identity fails at the window end", &mut errs);
            }
            MidseqCase::Two { markers, cuts } => {
                ensure(markers.windows(2).all(|p| p[0] < p[1]), "markers not increasing", &mut errs);
                let dl = deltas(l, d);
                ensure(
                    markers.windows(2).skip(1).all(|p| dl[p[0] as usize] < dl[p[1] as usize]),
                    "marker partial sums not increasing",
                    &mut errs,
                );
                ensure(markers.iter().skip(1).all(|&m| dl[m as usize] < self.sigma), "marker partial sum ≥ σ", &mut errs);
                let mid_excess = deltas(&self.lambda_mid, d);
                for (j, c) in cuts.iter().enumerate().skip(1) {
                    if mid_excess[*c as usize] != dl[markers[j] as usize] {
                        errs.push(format!("block {j}: Σ(λ̃ - d) differs from δ at the marker"));
                    }
                }
                // δ_k - δ_{m_{j-1}} ≥ Σ_{i≤k}(λ - mid) ≥ δ_k - δ_{m_j}
                let mid_gap = deltas(l, &self.lambda_mid);
                for j in 1..cuts.len() {
                    for k in (cuts[j - 1] + 1)..=cuts[j] {
                        let g = &mid_gap[k as usize];
                        let lo = &dl[k as usize] - &dl[markers[j] as usize];
                        let hi = &dl[k as usize] - &dl[markers[j - 1] as usize];
                        if g < &lo || g > &hi || g.is_negative() {
                            errs.push(format!("sandwich bound fails at k = {k}"));
                            break;
                        }
                    }
                }
            }
        }
        finish(errs)
    }

    pub fn to_json(&self) -> Value {
        let case = match &self.case {
            MidseqCase::One { m, z, n, alpha, beta } => {
                json!({"case": 1, "M": m, "Z": z, "N": n, "alpha": fmt_q(alpha), "beta": fmt_q(beta)})
            }
            MidseqCase::Two { markers, cuts } => json!({"case": 2, "markers": markers, "cuts": cuts}),
        };
        json!({
            "kind": "midseq",
            "parameters": case,
            "sigma": fmt_q(&self.sigma),
            "i0": self.i0,
            "epsilon": fmt_q(&self.epsilon),
            "lambda_tilde": qjson(&self.lambda_tilde),
        })
    }
}

// ---------------------------------------------------------------------------
// exequal

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExequalBlock {
    /// `I_k = {start, …, end}`.
    pub start: u64,
    pub end: u64,
    pub m: u64,
    pub n: u64,
    pub r: u64,
    pub count: u64,
    pub eta: Q,
}

/// Partition of the positive indices into blocks on which λ is redistributed
/// so that the positive excess matches the negative one at the block markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExequalPlan {
    pub blocks: Vec<ExequalBlock>,
    pub lambda: Vec<Q>,
    pub d: Vec<Q>,
    pub lambda_tilde: Vec<Q>,
    /// `δ_{-1}, δ_{-2}, …` on the negative side up to the last marker.
    pub neg_deltas: Vec<Q>,
}

struct Partial<'a> {
    l: &'a Side,
    d: &'a Side,
    sums: Vec<Q>,
}

impl<'a> Partial<'a> {
    fn new(l: &'a Side, d: &'a Side) -> Self {
        Partial { l, d, sums: vec![Q::zero()] }
    }

    fn at(&mut self, k: u64) -> Result<Q, ConstructError> {
        if k > WINDOW_CAP {
            return Err(ConstructError::Window(k));
        }
        while (self.sums.len() as u64) <= k {
            let i = self.sums.len() as u64;
            let v = self.sums.last().unwrap() + self.l.term(i) - self.d.term(i);
            self.sums.push(v);
        }
        Ok(self.sums[k as usize].clone())
    }
}

pub fn exequal_transform(
    lambda_pos: &Side,
    lambda_neg: &Side,
    d_pos: &Side,
    d_neg: &Side,
    blocks: usize,
) -> Result<ExequalPlan, ConstructError> {
    let work = Work::default();
    for (l, d) in [(lambda_pos, d_pos), (lambda_neg, d_neg)] {
        if !check_dominance(l, d, &work)? {
            return Err(ConstructError::Parameter(
                "λ_i > d_i holds only finitely often on one side; a larger window cannot help".into(),
            ));
        }
    }
    let sp = gap_limit(lambda_pos, d_pos, &work);
    let sn = gap_limit(lambda_neg, d_neg, &work);
    let equal = match (&sp, &sn) {
        (CertifiedValue::Exact(a), CertifiedValue::Exact(b)) => a == b,
        (CertifiedValue::PlusInfinity, CertifiedValue::PlusInfinity) => true,
        _ => false,
    };
    if !equal {
        return Err(ConstructError::Parameter(format!("excesses differ: {} and {}", sp.render(), sn.render())));
    }
    let mut pos = Partial::new(lambda_pos, d_pos);
    let mut neg = Partial::new(lambda_neg, d_neg);
    let mut out = Vec::new();
    let mut big_m = 0u64;
    let mut m_prev = 0u64;
    let mut changes: Vec<(u64, Q)> = Vec::new();
    for _ in 0..blocks {
        let target = pos.at(big_m + 1)?;
        let mut m = m_prev + 1;
        while neg.at(m)? <= target {
            m += 1;
        }
        let dm = neg.at(m)?;
        let mut n = big_m + 1;
        while pos.at(n)? < dm {
            n += 1;
        }
        let eta = pos.at(n)? - &dm;
        let dn = d_pos.term(n);
        if !dn.is_positive() {
            return Err(ConstructError::Parameter(format!("d_{n} = 0 leaves no room to spread the excess")));
        }
        let r = (n + 1).max(lambda_pos.count_ge(&dn) + 1);
        let lr = lambda_pos.term(r);
        let count: u64 = (floor(&(&eta / (&dn - &lr))) + BigInt::one()).try_into().map_err(|_| ConstructError::Window(u64::MAX))?;
        let end = r + count - 1;
        if end > WINDOW_CAP {
            return Err(ConstructError::Window(end));
        }
        changes.push((n, -eta.clone()));
        for i in r..=end {
            changes.push((i, &eta / qu(count)));
        }
        out.push(ExequalBlock { start: big_m + 1, end, m, n, r, count, eta });
        big_m = end;
        m_prev = m;
    }
    let lw = window(lambda_pos, big_m);
    let dw = window(d_pos, big_m);
    let mut lt = lw.clone();
    for (i, c) in changes {
        lt[(i - 1) as usize] += c;
    }
    let neg_deltas = (1..=m_prev).map(|k| neg.at(k)).collect::<Result<Vec<_>, _>>()?;
    Ok(ExequalPlan { blocks: out, lambda: lw, d: dw, lambda_tilde: lt, neg_deltas })
}

impl ExequalPlan {
    pub fn verify(&self) -> Result<(), String> {
        let mut errs = Vec::new();
        let mut prev_end = 0u64;
        let (mut pm, mut pn) = (0u64, 0u64);
        for (k, b) in self.blocks.iter().enumerate() {
            ensure(b.start == prev_end + 1, "blocks do not partition an initial segment", &mut errs);
            prev_end = b.end;
            let s = (b.start - 1) as usize..b.end as usize;
            if !finite_majorized(&self.lambda_tilde[s.clone()], &self.lambda[s.clone()]) {
                errs.push(format!("block {}: λ̃ not majorized by λ", k + 1));
            }
            if self.lambda_tilde[s.clone()].iter().zip(&self.d[s]).any(|(a, b)| a < b) {
                errs.push(format!("block {}: λ̃_i < d_i", k + 1));
            }
            let lhs: Q = self.lambda_tilde[..b.n as usize].iter().zip(&self.d).map(|(a, b)| a - b).sum();
            if lhs != self.neg_deltas[(b.m - 1) as usize] {
                errs.push(format!("block {}: positive excess to n_k differs from negative excess to m_k", k + 1));
            }
            ensure(b.m > pm && b.n > pn, "markers not increasing", &mut errs);
            pm = b.m;
            pn = b.n;
        }
        finish(errs)
    }

    pub fn to_json(&self) -> Value {
        let blocks: Vec<Value> = self
            .blocks
            .iter()
            .map(|b| json!({"start": b.start, "end": b.end, "m": b.m, "n": b.n, "r": b.r, "N": b.count, "eta": fmt_q(&b.eta)}))
            .collect();
        json!({"kind": "exequal", "blocks": blocks, "lambda_tilde": qjson(&self.lambda_tilde)})
    }
}

// ---------------------------------------------------------------------------
// fis

/// Prescribes the first `N` terms: `λ̃_i = d_i` for `i ≤ N`, `λ̃ = λ` beyond
/// `M`, and `λ̃` majorized by λ on `1..=M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FisPlan {
    pub m: u64,
    pub d: Vec<Q>,
    pub lambda: Vec<Q>,
    pub lambda_tilde: Vec<Q>,
}

pub fn fis_transform(lambda: &Side, d: &[Q]) -> Result<FisPlan, ConstructError> {
    if d.is_empty() || !nonincreasing(d) || d.iter().any(|x| !x.is_positive()) {
        return Err(ConstructError::Parameter("d must be a nonempty positive nonincreasing list".into()));
    }
    let n = d.len() as u64;
    let mut s = Q::zero();
    for k in 1..=n {
        s += lambda.term(k) - &d[(k - 1) as usize];
        if s.is_negative() {
            return Err(ConstructError::Majorization { n: k });
        }
    }
    let dn = d[d.len() - 1].clone();
    let sum_d: Q = d.iter().sum();
    let mut sum_l: Q = (1..=n).map(|k| lambda.term(k)).sum();
    let mut m = n;
    // expr(M) = Σ_{i≤M} λ_i - Σ d - (M - N) d_N
    while &sum_l - &sum_d - qu(m - n) * &dn > Q::zero() {
        m += 1;
        if m > WINDOW_CAP * 10 {
            return Err(ConstructError::Window(m));
        }
        sum_l += lambda.term(m);
    }
    let lw = window(lambda, m);
    let mut lt: Vec<Q> = d.to_vec();
    if m > n {
        for _ in (n + 1)..m {
            lt.push(dn.clone());
        }
        lt.push(&sum_l - &sum_d - qu(m - n - 1) * &dn);
    }
    Ok(FisPlan { m, d: d.to_vec(), lambda: lw, lambda_tilde: lt })
}

impl FisPlan {
    pub fn verify(&self) -> Result<(), String> {
        let mut errs = Vec::new();
        let n = self.d.len();
        ensure(self.lambda_tilde[..n] == self.d[..], "λ̃ differs from d on the first N terms", &mut errs);
        ensure(finite_majorized(&self.lambda_tilde, &self.lambda), "λ̃ not majorized by λ on 1..=M", &mut errs);
        ensure(self.lambda_tilde.iter().all(|x| x.is_positive()), "λ̃ has a nonpositive term", &mut errs);
        let dn = &self.d[n - 1];
        let sum_d: Q = self.d.iter().sum();
        let expr = |mm: usize| -> Q {
            let sl: Q = self.lambda[..mm].iter().sum();
            sl - &sum_d - qu((mm - n) as u64) * dn
        };
        let m = self.m as usize;
        ensure(!expr(m).is_positive(), "defining sum positive at M", &mut errs);
        if m > n {
            ensure(expr(m - 1).is_positive(), "M is not minimal", &mut errs);
        }
        finish(errs)
    }

    pub fn to_json(&self) -> Value {
        json!({"kind": "fis", "M": self.m, "lambda_tilde": qjson(&self.lambda_tilde)})
    }
}

// ---------------------------------------------------------------------------
// fiz

/// Collapses `M` negative terms and one positive term into `M` zeros and one
/// positive term carrying the sum. Indices are 1-based positions in the
/// enumeration order of the sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FizPlan {
    pub i0: u64,
    pub j: Vec<u64>,
    /// First `window` terms of λ and of λ̃.
    pub lambda: Vec<Q>,
    pub lambda_tilde: Vec<Q>,
    pub sequence: ExtendedSequence,
}

pub fn fiz_transform(lambda: &ExtendedSequence, m: u64) -> Result<FizPlan, ConstructError> {
    if lambda.count_pos() != ExtNat::Inf || lambda.count_neg() != ExtNat::Inf {
        return Err(ConstructError::Parameter("need infinitely many positive and negative terms".into()));
    }
    if lambda.zeros() != ExtNat::ZERO {
        return Err(ConstructError::Parameter("sequence must have no zero terms".into()));
    }
    // Smallest window holding the largest positive term and m negatives.
    let mut w = 1u64;
    loop {
        let t = lambda.terms(w);
        let negs = t.iter().filter(|x| x.is_negative()).count() as u64;
        if negs >= m && t.iter().any(|x| x.is_positive()) {
            break;
        }
        w += 1;
        if w > WINDOW_CAP {
            return Err(ConstructError::Window(w));
        }
    }
    loop {
        let t = lambda.terms(w);
        let i0 = t.iter().position(|x| x.is_positive()).unwrap();
        let negs: Vec<usize> = t.iter().enumerate().filter(|(_, x)| x.is_negative()).map(|(i, _)| i).collect();
        let chosen: Vec<usize> = negs[negs.len() - m as usize..].to_vec();
        let total: Q = &t[i0] + chosen.iter().map(|&i| &t[i]).sum::<Q>();
        if total.is_positive() {
            let mut lt = t.clone();
            for &i in &chosen {
                lt[i] = Q::zero();
            }
            lt[i0] = total;
            let mut j: Vec<u64> = chosen.iter().map(|&i| i as u64 + 1).collect();
            j.push(i0 as u64 + 1);
            j.sort_unstable();
            let sequence = rebuild(lambda, &t, &lt, m);
            return Ok(FizPlan { i0: i0 as u64 + 1, j, lambda: t, lambda_tilde: lt, sequence });
        }
        w *= 2;
        if w > WINDOW_CAP {
            return Err(ConstructError::Window(w));
        }
    }
}

/// Rebuilds the sequence with the window replaced.
fn rebuild(lambda: &ExtendedSequence, t: &[Q], lt: &[Q], zeros: u64) -> ExtendedSequence {
    let pw = t.iter().filter(|x| x.is_positive()).count() as u64;
    let nw = t.iter().filter(|x| x.is_negative()).count() as u64;
    let side = |s: &Side, used: u64, kept: Vec<Q>| {
        let mut prefix = kept;
        let pl = s.prefix_len();
        if used < pl {
            prefix.extend(s.prefix[used as usize..].iter().cloned());
        }
        Side::new(prefix, s.tail.shift(used.saturating_sub(pl)))
    };
    let kept_pos: Vec<Q> = lt.iter().filter(|x| x.is_positive()).cloned().collect();
    let kept_neg: Vec<Q> = lt.iter().filter(|x| x.is_negative()).map(|x| -x).collect();
    ExtendedSequence::from_sides(side(lambda.pos(), pw, kept_pos), side(lambda.neg(), nw, kept_neg), ExtNat::Fin(zeros))
}

impl FizPlan {
    pub fn verify(&self, m: u64) -> Result<(), String> {
        let mut errs = Vec::new();
        let idx: Vec<usize> = self.j.iter().map(|&i| (i - 1) as usize).collect();
        let a: Vec<Q> = idx.iter().map(|&i| self.lambda_tilde[i].clone()).collect();
        let b: Vec<Q> = idx.iter().map(|&i| self.lambda[i].clone()).collect();
        ensure(self.j.len() as u64 == m + 1, "|J| ≠ M + 1", &mut errs);
        ensure(finite_majorized(&a, &b), "λ̃ not majorized by λ on J", &mut errs);
        ensure(
            self.lambda.iter().zip(&self.lambda_tilde).enumerate().all(|(i, (x, y))| idx.contains(&i) || x == y),
            "λ̃ changed outside J",
            &mut errs,
        );
        let positives = b.iter().filter(|x| x.is_positive()).count();
        ensure(positives == 1, "J must contain exactly one positive term", &mut errs);
        let zeros = self.lambda_tilde.iter().filter(|x| x.is_zero()).count() as u64;
        ensure(zeros == m && self.sequence.zeros() == ExtNat::Fin(m), "λ̃ does not have exactly M zeros", &mut errs);
        finish(errs)
    }

    pub fn to_json(&self) -> Value {
        json!({"kind": "fiz", "i0": self.i0, "J": self.j, "lambda_tilde": qjson(&self.lambda_tilde)})
    }
}

// ---------------------------------------------------------------------------

/// Plans of the windowed transformers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformPlan {
    OneNeg(OneNegPlan),
    Midseq(MidseqPlan),
    Exequal(ExequalPlan),
}

impl TransformPlan {
    pub fn verify(&self) -> Result<(), String> {
        match self {
            TransformPlan::OneNeg(p) => p.verify(),
            TransformPlan::Midseq(p) => p.verify(),
            TransformPlan::Exequal(p) => p.verify(),
        }
    }

    pub fn lambda_tilde(&self) -> &[Q] {
        match self {
            TransformPlan::OneNeg(p) => &p.lambda_tilde,
            TransformPlan::Midseq(p) => &p.lambda_tilde,
            TransformPlan::Exequal(p) => &p.lambda_tilde,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TransformPlan::OneNeg(p) => p.to_json(),
            TransformPlan::Midseq(p) => p.to_json(),
            TransformPlan::Exequal(p) => p.to_json(),
        }
    }
}
