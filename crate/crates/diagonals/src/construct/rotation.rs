//! Two-dimensional moves and the rotation chains built from them.

use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::matrix::Mat;
use super::ConstructError;
use crate::seqcore::num::to_f64;
use crate::seqcore::Q;

/// One move on basis columns `i`, `j`:
/// `e_i = √α f_i + sign·√(1-α) f_j`, `e_j = √(1-α) f_i - sign·√α f_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Move {
    pub i: usize,
    pub j: usize,
    pub alpha: f64,
    pub sign: i8,
}

impl Move {
    fn apply(&self, basis: &mut Mat) {
        let c = self.alpha.max(0.0).sqrt();
        let s = self.sign as f64 * (1.0 - self.alpha).max(0.0).sqrt();
        basis.rotate_columns(self.i, self.j, c, s);
    }

    pub fn to_json(&self) -> Value {
        json!({"i": self.i, "j": self.j, "alpha": self.alpha, "sign": self.sign})
    }
}

/// A sequence of moves and the orthogonal matrix they accumulate (columns are
/// the new basis vectors in the original coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct RotationChain {
    pub moves: Vec<Move>,
    pub basis: Mat,
}

impl RotationChain {
    pub fn new(dim: usize) -> RotationChain {
        RotationChain { moves: Vec::new(), basis: Mat::identity(dim) }
    }

    pub fn push(&mut self, m: Move) {
        m.apply(&mut self.basis);
        self.moves.push(m);
    }

    /// `⟨E b_k, b_k⟩` for every basis column when `E = diag(values)`.
    pub fn diagonal_of(&self, values: &[f64]) -> Vec<f64> {
        let n = self.basis.n;
        (0..n).map(|k| (0..n).map(|r| values[r] * self.basis.get(r, k).powi(2)).sum()).collect()
    }

    pub fn to_json(&self) -> Value {
        json!({"moves": self.moves.iter().map(Move::to_json).collect::<Vec<_>>(), "dim": self.basis.n})
    }
}

/// Rotates coordinates `i`, `j` of the symmetric matrix `e` so that the new
/// `(i, i)` entry equals `target`; the `(j, j)` entry receives the rest of the
/// 2×2 trace. Returns the move and the rotated matrix.
///
/// The current entries must differ and bracket `target`. Among the solutions
/// the one closest to the identity is taken.
pub fn offdiag_move(e: &Mat, i: usize, j: usize, target: f64) -> Result<(Move, Mat), ConstructError> {
    let a = e.get(i, i);
    let b = e.get(j, j);
    let c = e.get(i, j);
    if a == b {
        return Err(ConstructError::Degenerate(a));
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    if target < lo - slack || target > hi + slack {
        return Err(ConstructError::NotBracketed { target, lo, hi });
    }
    let phi = if c == 0.0 {
        // α a + (1-α) b = target
        let alpha = ((b - target) / (b - a)).clamp(0.0, 1.0);
        alpha.sqrt().acos()
    } else {
        // a cos²φ + b sin²φ + c sin 2φ = m + R cos(2φ - ψ)
        let m = (a + b) / 2.0;
        let h = (a - b) / 2.0;
        let r = (h * h + c * c).sqrt();
        let psi = c.atan2(h);
        let w = ((target - m) / r).clamp(-1.0, 1.0).acos();
        let wrap = |x: f64| {
            let mut y = x;
            while y > std::f64::consts::FRAC_PI_2 {
                y -= std::f64::consts::PI;
            }
            while y <= -std::f64::consts::FRAC_PI_2 {
                y += std::f64::consts::PI;
            }
            y
        };
        let p1 = wrap((psi + w) / 2.0);
        let p2 = wrap((psi - w) / 2.0);
        if p1.abs() <= p2.abs() {
            p1
        } else {
            p2
        }
    };
    let (cs, sn) = (phi.cos(), phi.sin());
    let mv = Move { i, j, alpha: cs * cs, sign: if sn < 0.0 { -1 } else { 1 } };
    let mut g = Mat::identity(e.n);
    mv.apply(&mut g);
    Ok((mv, e.congruence(&g)))
}

/// Closed form of the move parameter for a diagonal 2×2 block.
pub fn alpha_for(a: &Q, b: &Q, target: &Q) -> Q {
    (b - target) / (b - a)
}

/// Result of a chain built by the recursion `e_i = √α_i ẽ_i + √(1-α_i) f_{i+1}`,
/// `ẽ_{i+1} = √(1-α_i) ẽ_i - √α_i f_{i+1}`, starting from `ẽ_1 = f_1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LossChain {
    pub chain: RotationChain,
    /// `Π (1 - α_i)`: zero certifies that the vectors span everything in the limit.
    pub product: Q,
    /// `⟨E e_i, e_i⟩` and finally `⟨E ẽ_{k+1}, ẽ_{k+1}⟩` for `E = diag(f_diag)`.
    pub diagonal: Vec<f64>,
}

fn build_chain(f_diag: &[Q], alphas: &[Q]) -> LossChain {
    let dim = alphas.len() + 1;
    let mut chain = RotationChain::new(dim);
    let mut product = Q::one();
    for (k, a) in alphas.iter().enumerate() {
        chain.push(Move { i: k, j: k + 1, alpha: to_f64(a), sign: 1 });
        product *= Q::one() - a;
    }
    let mut vals: Vec<f64> = f_diag.iter().map(to_f64).collect();
    vals.resize(dim, 0.0);
    let diagonal = chain.diagonal_of(&vals);
    LossChain { chain, product, diagonal }
}

/// Finite chain `e_1, …, e_k, ẽ_{k+1}` for `α_i ∈ [0, 1]`.
pub fn loss_chain(f_diag: &[Q], alphas: &[Q]) -> Result<LossChain, ConstructError> {
    if let Some(a) = alphas.iter().find(|a| *a < &Q::zero() || *a > &Q::one()) {
        return Err(ConstructError::Parameter(format!("alpha {a} outside [0, 1]")));
    }
    Ok(build_chain(f_diag, alphas))
}

/// Chain whose trailing vectors converge, with the Cauchy identity
/// `‖ẽ_i - ẽ_{i+n}‖² = 2(1 - (Π_{j=i}^{i+n-1}(1-α_j))^{1/2})` checked on every pair.
#[derive(Clone, Debug, PartialEq)]
pub struct NolossChain {
    pub chain: LossChain,
    /// Largest deviation between the computed distances and the closed form.
    pub cauchy_error: f64,
    /// `Σ α_i / (1 - α_i)`; finite sums certify convergence of `ẽ_n`.
    pub tail_sum: Q,
}

pub fn noloss_chain(f_count: usize, alphas: &[Q]) -> Result<NolossChain, ConstructError> {
    if let Some(a) = alphas.iter().find(|a| *a < &Q::zero() || *a >= &Q::one()) {
        return Err(ConstructError::Parameter(format!("alpha {a} outside [0, 1)")));
    }
    let k = alphas.len().min(f_count.saturating_sub(1));
    let alphas = &alphas[..k];
    // Track ẽ_1, …, ẽ_{k+1} explicitly.
    let dim = k + 1;
    let mut tilde: Vec<Vec<f64>> = Vec::with_capacity(dim);
    let mut cur = vec![0.0; dim];
    cur[0] = 1.0;
    tilde.push(cur.clone());
    for (i, a) in alphas.iter().enumerate() {
        let a = to_f64(a);
        let mut next: Vec<f64> = cur.iter().map(|x| (1.0 - a).sqrt() * x).collect();
        next[i + 1] -= a.sqrt();
        cur = next;
        tilde.push(cur.clone());
    }
    let mut cauchy_error = 0.0f64;
    for i in 0..dim {
        let mut prod = 1.0f64;
        for n in 1..(dim - i) {
            prod *= 1.0 - to_f64(&alphas[i + n - 1]);
            let dist: f64 = tilde[i].iter().zip(&tilde[i + n]).map(|(x, y)| (x - y).powi(2)).sum();
            let closed = 2.0 * (1.0 - prod.sqrt());
            cauchy_error = cauchy_error.max((dist - closed).abs());
        }
    }
    let tail_sum = alphas.iter().map(|a| a / (Q::one() - a)).sum();
    Ok(NolossChain { chain: build_chain(&[], alphas), cauchy_error, tail_sum })
}

/// Smallest `n` with `Σ_{k=1}^{n} (t_k - t_{k+1}) / t_{k+1} > bound`, searching up to `cap`.
/// For positive sequences decreasing to zero this always exists.
pub fn loglem_index(t: impl Fn(u64) -> Q, bound: &Q, cap: u64) -> Option<u64> {
    let mut s = Q::zero();
    let mut prev = t(1);
    for n in 1..=cap {
        let next = t(n + 1);
        s += (&prev - &next) / &next;
        if &s > bound {
            return Some(n);
        }
        prev = next;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqcore::num::{q, qi};

    #[test]
    fn offdiag_closed_form() {
        let e = Mat::diag(&[0.0, 2.0]);
        let (mv, out) = offdiag_move(&e, 0, 1, 1.0).unwrap();
        assert!((mv.alpha - 0.5).abs() < 1e-15);
        assert!((out.get(0, 0) - 1.0).abs() < 1e-14 && (out.get(1, 1) - 1.0).abs() < 1e-14);
        let (mv, _) = offdiag_move(&e, 0, 1, 0.0).unwrap();
        assert!((mv.alpha - 1.0).abs() < 1e-15);
        let deg = Mat::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        assert!(matches!(offdiag_move(&deg, 0, 1, 1.0), Err(ConstructError::Degenerate(_))));
    }

    #[test]
    fn offdiag_with_coupling() {
        let e = Mat::from_rows(&[vec![1.0, 0.5], vec![0.5, 3.0]]);
        let (_, out) = offdiag_move(&e, 0, 1, 2.5).unwrap();
        assert!((out.get(0, 0) - 2.5).abs() < 1e-12);
        assert!((out.get(1, 1) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn chains() {
        let ones = loss_chain(&[], &[qi(1), qi(1)]).unwrap();
        assert!(ones.chain.basis.orthogonality_defect() < 1e-15);
        assert_eq!(ones.product, qi(0));
        let zeros = loss_chain(&[], &[qi(0), qi(0)]).unwrap();
        assert_eq!(zeros.product, qi(1));
        let half = loss_chain(&[], &[q(1, 2), q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(half.product, q(1, 8));
        assert!(half.chain.basis.orthogonality_defect() < 1e-12);

        let nl = noloss_chain(2, &[q(1, 4)]).unwrap();
        assert!(nl.cauchy_error < 1e-12);
        let geo: Vec<Q> = (1..=10).map(|i| Q::new(1.into(), num_bigint::BigInt::from(4).pow(i))).collect();
        let nl = noloss_chain(11, &geo).unwrap();
        assert!(nl.tail_sum < q(1, 2));
    }

    #[test]
    fn loglem_diverges() {
        let n = loglem_index(|n| Q::new(1.into(), (n as i64).into()), &qi(3), 1000).unwrap();
        // Σ_{k≤n} 1/k > 3 first at n = 11
        assert_eq!(n, 11);
    }
}
