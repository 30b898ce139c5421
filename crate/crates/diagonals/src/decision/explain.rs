//! Human-readable and JSON reports of a decision.

use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{decide, decide_at, decide_up_to, Verdict};
use crate::majorization::{delta, gap_at, knots, Direction};
use crate::seqcore::num::fmt_q;
use crate::seqcore::{CertifiedValue, ExtendedSequence, Work, Q};

/// Number of knot levels and partial-sum indices tabulated per side.
const ROWS: usize = 8;

#[derive(Clone, Debug)]
pub struct ExplainReport {
    pub verdict: Verdict,
    /// `(α, δ(α))` at the first levels of λ, both signs.
    pub levels: Vec<(Q, CertifiedValue)>,
    /// `(n, G_n)` for the positive part, then for the negative part.
    pub gaps_plus: Vec<(u64, CertifiedValue)>,
    pub gaps_minus: Vec<(u64, CertifiedValue)>,
}

pub fn explain(lambda: &ExtendedSequence, d: &ExtendedSequence) -> ExplainReport {
    build(lambda, d, decide(lambda, d))
}

/// As [`explain`], escalating the work level no further than `max_level`.
pub fn explain_up_to(lambda: &ExtendedSequence, d: &ExtendedSequence, max_level: u8) -> ExplainReport {
    build(lambda, d, decide_up_to(lambda, d, max_level))
}

pub fn explain_at(lambda: &ExtendedSequence, d: &ExtendedSequence, level: u8) -> ExplainReport {
    build(lambda, d, decide_at(lambda, d, level))
}

fn build(lambda: &ExtendedSequence, d: &ExtendedSequence, verdict: Verdict) -> ExplainReport {
    let work = Work::level(verdict.level);
    let mut levels = Vec::new();
    for dir in [Direction::Positive, Direction::Negative] {
        for a in knots(lambda, dir, ROWS as u64).values.into_iter().take(ROWS) {
            if let Ok(v) = delta(&a, lambda, d, &work) {
                levels.push((a, v));
            }
        }
    }
    let gaps = |l: &crate::seqcore::Side, ds: &crate::seqcore::Side| {
        (1..=ROWS as u64).map(|n| (n, gap_at(l, ds, n, &work))).collect::<Vec<_>>()
    };
    ExplainReport {
        gaps_plus: gaps(lambda.pos(), d.pos()),
        gaps_minus: gaps(lambda.neg(), d.neg()),
        levels,
        verdict,
    }
}

fn rows_json<T: Into<Value> + Clone>(rows: &[(T, CertifiedValue)], key: &str) -> Vec<Value> {
    rows.iter().map(|(k, v)| json!({key: k.clone().into(), "value": v.render()})).collect()
}

impl ExplainReport {
    pub fn to_json(&self) -> Value {
        let levels: Vec<_> = self.levels.iter().map(|(a, v)| json!({"alpha": fmt_q(a), "delta": v.render()})).collect();
        json!({
            "verdict": self.verdict.to_json(),
            "delta": levels,
            "partial_sum_gaps": {
                "positive": rows_json(&self.gaps_plus, "n"),
                "negative": rows_json(&self.gaps_minus, "n"),
            },
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = self.verdict.to_text();
        if !self.levels.is_empty() {
            let _ = writeln!(s, "level function δ(α):");
            for (a, d) in &self.levels {
                let _ = writeln!(s, "  α = {:<12} δ = {}", fmt_q(a), d);
            }
        }
        let _ = writeln!(s, "partial-sum gaps (positive | negative):");
        for ((n, a), (_, b)) in self.gaps_plus.iter().zip(&self.gaps_minus) {
            let _ = writeln!(s, "  n = {:<4} {} | {}", n, a, b);
        }
        s
    }
}
