//! Dense real matrices, a cyclic Jacobi eigensolver, and realization checks.

use serde_json::{json, Value};

use super::ConstructError;
use crate::seqcore::num::to_f64;
use crate::seqcore::Q;

/// Row-major dense square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Mat {
        Mat { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diag(values: &[f64]) -> Mat {
        let mut m = Mat::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Mat {
        let n = rows.len();
        let mut m = Mat::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            for (j, v) in r.iter().enumerate() {
                m.set(i, j, *v);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    /// `Bᵀ A B`.
    pub fn congruence(&self, b: &Mat) -> Mat {
        b.transpose().mul(&self.mul(b))
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                m = m.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        m
    }

    /// `max |BᵀB - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.transpose().mul(self);
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                m = m.max((g.get(i, j) - target).abs());
            }
        }
        m
    }

    /// Frobenius norm of the strictly off-diagonal part.
    pub fn off_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.get(i, j).powi(2);
                }
            }
        }
        s.sqrt()
    }

    /// Replaces columns `i`, `j` by `c·col_i + s·col_j` and `s·col_i - c·col_j`.
    pub fn rotate_columns(&mut self, i: usize, j: usize, c: f64, s: f64) {
        for r in 0..self.n {
            let a = self.get(r, i);
            let b = self.get(r, j);
            self.set(r, i, c * a + s * b);
            self.set(r, j, s * a - c * b);
        }
    }

    /// One line per row, entries separated by spaces.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| format!("{:.17e}", self.get(i, j))).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Vec<f64>> = (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect();
        json!({"n": self.n, "rows": rows})
    }
}

/// Block-diagonal assembly.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let n = blocks.iter().map(|b| b.n).sum();
    let mut m = Mat::zeros(n);
    let mut off = 0;
    for b in blocks {
        for i in 0..b.n {
            for j in 0..b.n {
                m.set(off + i, off + j, b.get(i, j));
            }
        }
        off += b.n;
    }
    m
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, stopping once
/// the off-diagonal Frobenius mass drops below `tol`. Returned in
/// nonincreasing order.
pub fn jacobi_eigenvalues(a: &Mat, tol: f64) -> Result<Vec<f64>, ConstructError> {
    if a.asymmetry() > tol.max(1e-12) * (1.0 + max_abs(a)) {
        return Err(ConstructError::NotSymmetric(a.asymmetry()));
    }
    let n = a.n;
    let mut m = a.clone();
    for _sweep in 0..100 {
        if m.off_norm() < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
            }
        }
    }
    let mut ev = m.diagonal();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    Ok(ev)
}

fn max_abs(a: &Mat) -> f64 {
    a.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Residuals of a claimed realization.
#[derive(Clone, Debug, PartialEq)]
pub struct RealizationReport {
    pub eigen_residual: f64,
    pub diagonal_residual: f64,
    pub eigenvalues: Vec<f64>,
}

impl RealizationReport {
    pub fn within(&self, tol: f64) -> bool {
        self.eigen_residual < tol && self.diagonal_residual < tol
    }

    pub fn to_json(&self) -> Value {
        json!({"eigen_residual": self.eigen_residual, "diagonal_residual": self.diagonal_residual})
    }
}

/// Compares the spectrum of `m` with `lambda` (as multisets) and its diagonal
/// with `d` (entrywise).
pub fn verify_realization(m: &Mat, lambda: &[Q], d: &[Q], tol: f64) -> Result<RealizationReport, ConstructError> {
    if lambda.len() != m.n || d.len() != m.n {
        return Err(ConstructError::Dimension { expected: m.n, got: lambda.len().max(d.len()) });
    }
    let ev = jacobi_eigenvalues(m, tol * 1e-3)?;
    let mut l: Vec<f64> = lambda.iter().map(to_f64).collect();
    l.sort_by(|x, y| y.partial_cmp(x).unwrap());
    let eigen_residual = ev.iter().zip(&l).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
    let diagonal_residual = m.diagonal().iter().zip(d).fold(0.0f64, |acc, (a, b)| acc.max((a - to_f64(b)).abs()));
    Ok(RealizationReport { eigen_residual, diagonal_residual, eigenvalues: ev })
}
