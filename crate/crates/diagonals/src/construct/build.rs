//! Finite realizations: Schur-Horn matrices and truncated one-negative-term chains.

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::matrix::Mat;
use super::rotation::{alpha_for, Move, RotationChain};
use super::ConstructError;
use crate::seqcore::num::{fmt_q, pow, q, to_f64};
use crate::seqcore::Q;

/// Symmetric matrix with eigenvalues `lambda` and diagonal `d` (in the given
/// order of `d`), built from a chain of two-dimensional moves.
pub fn schur_horn_build(lambda: &[Q], d: &[Q]) -> Result<Mat, ConstructError> {
    Ok(schur_horn_chain(lambda, d)?.0)
}

/// As [`schur_horn_build`], also returning the rotation chain in the
/// eigenbasis of the sorted `lambda`.
pub fn schur_horn_chain(lambda: &[Q], d: &[Q]) -> Result<(Mat, RotationChain), ConstructError> {
    let n = lambda.len();
    if d.len() != n {
        return Err(ConstructError::Dimension { expected: n, got: d.len() });
    }
    let mut l = lambda.to_vec();
    l.sort_by(|a, b| b.cmp(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].cmp(&d[a]));
    let ds: Vec<Q> = order.iter().map(|&i| d[i].clone()).collect();
    let (mut sl, mut sd) = (Q::zero(), Q::zero());
    for k in 0..n {
        sl += &l[k];
        sd += &ds[k];
        if sd > sl {
            return Err(ConstructError::Majorization { n: k as u64 + 1 });
        }
    }
    if sl != sd {
        return Err(ConstructError::Trace { lambda: fmt_q(&sl), d: fmt_q(&sd) });
    }

    // Active columns carry exact rational diagonal values of a compression
    // that stays diagonal; finished columns hold d in sorted order.
    let mut chain = RotationChain::new(n);
    let mut value: Vec<Q> = l.clone();
    let mut active: Vec<usize> = (0..n).collect();
    let mut slot_of = vec![0usize; n];
    for (k, target) in ds.iter().enumerate() {
        // Largest active value ≥ target and smallest active value ≤ target.
        let hi = active.iter().copied().filter(|&c| value[c] >= *target).min_by(|&x, &y| value[x].cmp(&value[y]));
        let lo = active.iter().copied().filter(|&c| value[c] <= *target).max_by(|&x, &y| value[x].cmp(&value[y]));
        let (hi, lo) = match (hi, lo) {
            (Some(h), Some(l)) => (h, l),
            _ => return Err(ConstructError::Majorization { n: k as u64 + 1 }),
        };
        let done = if value[hi] == *target {
            hi
        } else if value[lo] == *target {
            lo
        } else {
            let alpha = alpha_for(&value[hi], &value[lo], target);
            chain.push(Move { i: hi, j: lo, alpha: to_f64(&alpha), sign: 1 });
            value[lo] = &value[hi] + &value[lo] - target;
            value[hi] = target.clone();
            hi
        };
        active.retain(|&c| c != done);
        slot_of[done] = order[k];
    }
    // Column `c` of the chain basis realizes d[slot_of[c]].
    let mut basis = Mat::zeros(n);
    for c in 0..n {
        for r in 0..n {
            basis.set(r, slot_of[c], chain.basis.get(r, c));
        }
    }
    let lam: Vec<f64> = l.iter().map(to_f64).collect();
    let mut m = Mat::diag(&lam).congruence(&basis);
    symmetrize(&mut m);
    Ok((m, chain))
}

fn symmetrize(m: &mut Mat) {
    for i in 0..m.n {
        for j in 0..i {
            let v = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
}

/// Record of a truncated chain construction.
#[derive(Clone, Debug, PartialEq)]
pub struct BuildTrace {
    pub target: Vec<Q>,
    /// Diagonal entries realized by the chain, in floating point.
    pub achieved_diagonal: Vec<f64>,
    /// The leftover entry at the end of the chain, exactly and in floating point.
    pub residual_exact: Q,
    pub residual_entry: f64,
    pub alphas: Vec<Q>,
    /// Largest deviation of the running trace from the initial one.
    pub trace_drift: f64,
    /// `max λ_n / t_{n+1}` over the window, when all `t_{n+1} > 0`.
    pub c_bound: Option<Q>,
    pub chain: RotationChain,
}

impl BuildTrace {
    /// Largest entrywise gap between achieved and target diagonal.
    pub fn diagonal_error(&self) -> f64 {
        self.achieved_diagonal.iter().zip(&self.target).fold(0.0f64, |m, (a, t)| m.max((a - to_f64(t)).abs()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target.iter().map(fmt_q).collect::<Vec<_>>(),
            "achieved_diagonal": self.achieved_diagonal,
            "residual_entry": self.residual_entry,
            "residual_exact": fmt_q(&self.residual_exact),
            "alphas": self.alphas.iter().map(to_f64).collect::<Vec<_>>(),
            "trace_drift": self.trace_drift,
            "c_bound": self.c_bound.as_ref().map(fmt_q),
        })
    }
}

/// Runs a chain where a single running vector `ẽ` is rotated against fresh
/// basis vectors `f_2, f_3, …`, fixing one diagonal entry per step.
/// `start` is the value on `ẽ_1 = f_1`; step `n` pairs it with `partner[n]`
/// with weight `alphas[n]` on the running vector.
fn running_chain(start: &Q, partner: &[Q], alphas: &[Q]) -> (Vec<f64>, f64, f64, RotationChain) {
    let n = partner.len();
    let dim = n + 1;
    let mut vals = vec![to_f64(start)];
    vals.extend(partner.iter().map(to_f64));
    let trace0: f64 = vals.iter().sum();
    // Column 0 carries ẽ; finished vectors are written to columns 1..=n in order.
    let mut chain = RotationChain::new(dim);
    let mut tilde = vec![0.0; dim];
    tilde[0] = 1.0;
    let mut achieved = Vec::with_capacity(n);
    let mut done_sum = 0.0;
    let mut drift = 0.0f64;
    let mut finished: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..n {
        let a = to_f64(&alphas[k]);
        let (sa, sb) = (a.sqrt(), (1.0 - a).max(0.0).sqrt());
        // e = √α ẽ + √(1-α) f_{k+2}; ẽ' = √(1-α) ẽ - √α f_{k+2}
        let mut e: Vec<f64> = tilde.iter().map(|x| sa * x).collect();
        e[k + 1] += sb;
        let mut nt: Vec<f64> = tilde.iter().map(|x| sb * x).collect();
        nt[k + 1] -= sa;
        let de: f64 = e.iter().zip(&vals).map(|(x, v)| v * x * x).sum();
        let dt: f64 = nt.iter().zip(&vals[..]).take(k + 2).map(|(x, v)| v * x * x).sum();
        achieved.push(de);
        done_sum += de;
        let rest: f64 = vals[(k + 2)..].iter().sum();
        drift = drift.max((done_sum + dt + rest - trace0).abs());
        finished.push(e);
        tilde = nt;
        chain.moves.push(Move { i: 0, j: k + 1, alpha: a, sign: 1 });
    }
    let residual: f64 = tilde.iter().zip(&vals).map(|(x, v)| v * x * x).sum();
    let mut basis = Mat::zeros(dim);
    for (c, v) in finished.iter().enumerate() {
        for r in 0..dim {
            basis.set(r, c, v[r]);
        }
    }
    for r in 0..dim {
        basis.set(r, n, tilde[r]);
    }
    chain.basis = basis;
    (achieved, residual, drift, chain)
}

/// Truncated chain for a positive sequence dominating `d` termwise plus one
/// negative eigenvalue `-λ₋₁`.
///
/// Starting from `diag(-λ₋₁, λ_1, …, λ_N)`, step `n` rotates the running
/// vector (value `-t_n`) against `f_{n+1}` (value `λ_n`) with
/// `α_n = (λ_n - d_n)/(λ_n + t_n)`, where `t_n = λ₋₁ - Σ_{i<n}(λ_i - d_i)`.
/// The achieved diagonal is `(d_1, …, d_N, -t_{N+1})`; in the infinite chain
/// the last entry is the term that vanishes in the limit.
pub fn tbound_build(lambda: &[Q], d: &[Q], lambda_neg1: &Q, n: usize) -> Result<BuildTrace, ConstructError> {
    if !lambda_neg1.is_positive() {
        return Err(ConstructError::Parameter("the negative eigenvalue must be nonzero".into()));
    }
    if lambda.len() < n || d.len() < n {
        return Err(ConstructError::Dimension { expected: n, got: lambda.len().min(d.len()) });
    }
    let mut t = lambda_neg1.clone();
    let mut alphas = Vec::with_capacity(n);
    let mut ts = vec![t.clone()];
    for k in 0..n {
        if lambda[k] < d[k] {
            return Err(ConstructError::Dominance { index: k as u64 + 1 });
        }
        alphas.push((&lambda[k] - &d[k]) / (&lambda[k] + &t));
        t = &t - (&lambda[k] - &d[k]);
        if t.is_negative() {
            return Err(ConstructError::Parameter(format!(
                "negative eigenvalue {} is smaller than the excess of the first {} terms",
                fmt_q(lambda_neg1),
                k + 1
            )));
        }
        ts.push(t.clone());
    }
    let c_bound = (0..n)
        .map(|k| if ts[k + 1].is_zero() { None } else { Some(&lambda[k] / &ts[k + 1]) })
        .try_fold(Q::zero(), |m, x| x.map(|x| if x > m { x } else { m }));
    let (achieved, residual, drift, chain) = running_chain(&-lambda_neg1, &lambda[..n], &alphas);
    Ok(BuildTrace {
        target: d[..n].to_vec(),
        achieved_diagonal: achieved,
        residual_exact: -t,
        residual_entry: residual,
        alphas,
        trace_drift: drift,
        c_bound,
        chain,
    })
}

/// Truncated construction for one positive eigenvalue `λ_1` against negative
/// eigenvalues `-λ₋ᵢ` with `s = Σ λ₋ᵢ < λ_1`.
///
/// Targets `λ̃_{i+1} = 2^{-i} ε` are moved out one at a time while the running
/// vector's value `λ_1^{(n)} = λ_1 - Σ_{i<n} (ε/2^i + λ₋ᵢ)` decreases towards
/// `λ_1 - s - ε`. `ε` is reduced to `(λ_1 - s)/2` when larger.
pub fn infmove_build(lambda1: &Q, lambda_neg: &[Q], epsilon: &Q, n: usize) -> Result<BuildTrace, ConstructError> {
    let s: Q = lambda_neg.iter().sum();
    if lambda_neg.iter().any(|x| x.is_negative()) {
        return Err(ConstructError::Parameter("negative magnitudes must be nonnegative".into()));
    }
    if &s >= lambda1 {
        return Err(ConstructError::Parameter("negative mass must be smaller than the positive eigenvalue".into()));
    }
    if !epsilon.is_positive() {
        return Err(ConstructError::Parameter("epsilon must be positive".into()));
    }
    let cap = (lambda1 - &s) / Q::from_integer(2.into());
    let eps = if epsilon > &cap { cap } else { epsilon.clone() };
    let neg = |i: usize| lambda_neg.get(i).cloned().unwrap_or_else(Q::zero);
    let mut cur = lambda1.clone();
    let mut alphas = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    let mut partners = Vec::with_capacity(n);
    for k in 0..n {
        let target = &eps * pow(&q(1, 2), k as u64 + 1);
        // β = (λ_1^{(n)} - λ̃_{n+1}) / (λ_1^{(n)} + λ₋ₙ), the weight on the negative vector.
        let beta = (&cur - &target) / (&cur + neg(k));
        alphas.push(Q::one() - &beta);
        partners.push(-neg(k));
        cur = &cur - &target - neg(k);
        targets.push(target);
    }
    let (achieved, residual, drift, chain) = running_chain(lambda1, &partners, &alphas);
    Ok(BuildTrace {
        target: targets,
        achieved_diagonal: achieved,
        residual_exact: cur,
        residual_entry: residual,
        alphas,
        trace_drift: drift,
        c_bound: None,
        chain,
    })
}

/// The full realized matrix `Bᵀ diag(start, partners…) B` of a running chain.
pub fn chain_matrix(trace: &BuildTrace, diagonal: &[Q]) -> Mat {
    let vals: Vec<f64> = diagonal.iter().map(to_f64).collect();
    let mut m = Mat::diag(&vals).congruence(&trace.chain.basis);
    symmetrize(&mut m);
    m
}
