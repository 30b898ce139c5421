//! Command front end: problem files, the `check`/`explain`/`build`/`oracle`
//! commands, and their reports. Every command returns its exit code and
//! report instead of printing, so the binary stays a thin wrapper.

pub mod oracle;

use std::fmt;

use num_traits::Signed;
use serde_json::{json, Value};

use crate::construct::{chain_matrix, schur_horn_build, tbound_build, verify_realization, Mat, RealizationReport};
use crate::decision::{decide_up_to, explain_up_to, Outcome, Verdict};
use crate::seqcore::num::{fmt_q, to_f64};
use crate::seqcore::{ExtNat, ExtendedSequence, Q};

pub use oracle::{cmd_oracle, OracleKind, OracleParams};

/// Exit code for malformed input.
pub const EXIT_INPUT: i32 = 64;
/// Exit code when no builder applies to a diagonal instance.
pub const EXIT_NO_BUILDER: i32 = 5;
/// Exit code when an oracle suite records a violation.
pub const EXIT_VIOLATION: i32 = 4;

/// Tolerance for the numerical realization checks.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "json" => Some(Format::Json),
            "text" => Some(Format::Text),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Text => "text",
        }
    }
}

/// Run options. The precision level fixes the work bounds
/// (`N_work`, `K_tail`) = (10⁴, 64), (10⁵, 512), (10⁶, 2¹⁴).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub precision: u8,
    pub truncation: usize,
    pub format: Format,
}

impl Default for Options {
    fn default() -> Self {
        Options { precision: 3, truncation: 64, format: Format::Json }
    }
}

/// Command-line overrides of the options stored in a problem file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub precision: Option<u8>,
    pub truncation: Option<usize>,
    pub format: Option<Format>,
}

impl Options {
    pub fn with(mut self, o: &Overrides) -> Options {
        if let Some(p) = o.precision {
            self.precision = p;
        }
        if let Some(n) = o.truncation {
            self.truncation = n;
        }
        if let Some(f) = o.format {
            self.format = f;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("invalid problem: {0}")]
    Spec(String),
}

/// A decision or construction problem: eigenvalue list, candidate diagonal, options.
///
/// ```json
/// {"lambda": {"prefix": ["-1"], "pos_tail": {"kind": "geometric", "first": "1", "ratio": "1/2"}},
///  "d": {"pos_tail": {"kind": "geometric", "first": "1/2", "ratio": "1/2"}},
///  "options": {"precision": 1, "truncation": 64, "format": "text"}}
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub lambda: ExtendedSequence,
    pub d: ExtendedSequence,
    pub options: Options,
}

impl ProblemSpec {
    pub fn new(lambda: ExtendedSequence, d: ExtendedSequence) -> ProblemSpec {
        ProblemSpec { lambda, d, options: Options::default() }
    }

    pub fn parse(text: &str) -> Result<ProblemSpec, CliError> {
        let v: Value = serde_json::from_str(text).map_err(|e| CliError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        ProblemSpec::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<ProblemSpec, CliError> {
        let obj = v.as_object().ok_or_else(|| CliError::Spec("top level must be an object".into()))?;
        let seq = |key: &str| -> Result<ExtendedSequence, CliError> {
            let s = obj.get(key).ok_or_else(|| CliError::Spec(format!("missing `{key}`")))?;
            ExtendedSequence::from_json(s).map_err(|e| CliError::Spec(format!("`{key}`: {e}")))
        };
        let mut options = Options::default();
        if let Some(o) = obj.get("options") {
            let o = o.as_object().ok_or_else(|| CliError::Spec("`options` must be an object".into()))?;
            if let Some(p) = o.get("precision") {
                options.precision = p
                    .as_u64()
                    .filter(|p| (1..=3).contains(p))
                    .ok_or_else(|| CliError::Spec("precision must be 1, 2 or 3".into()))? as u8;
            }
            if let Some(n) = o.get("truncation") {
                options.truncation =
                    n.as_u64().ok_or_else(|| CliError::Spec("truncation must be a natural number".into()))? as usize;
            }
            if let Some(f) = o.get("format") {
                options.format = f
                    .as_str()
                    .and_then(Format::parse)
                    .ok_or_else(|| CliError::Spec("format must be \"json\" or \"text\"".into()))?;
            }
        }
        Ok(ProblemSpec { lambda: seq("lambda")?, d: seq("d")?, options })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lambda": self.lambda.to_json(),
            "d": self.d.to_json(),
            "options": {
                "precision": self.options.precision,
                "truncation": self.options.truncation,
                "format": self.options.format.as_str(),
            },
        })
    }
}

/// Exit code and report of one command. `artifact` holds the build output
/// when there is one.
#[derive(Clone, Debug, PartialEq)]
pub struct CmdOutput {
    pub code: i32,
    pub report: String,
    pub artifact: Option<String>,
}

impl CmdOutput {
    fn new(code: i32, report: String) -> CmdOutput {
        CmdOutput { code, report, artifact: None }
    }

    fn input_error(e: &CliError, format: Format) -> CmdOutput {
        let report = match format {
            Format::Json => {
                let mut v = json!({"error": "input", "message": e.to_string()});
                if let CliError::Json { line, column, .. } = e {
                    v["line"] = json!(line);
                    v["column"] = json!(column);
                }
                pretty(&v)
            }
            Format::Text => format!("error: {e}\n"),
        };
        CmdOutput::new(EXIT_INPUT, report)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

fn load(text: &str, ov: &Overrides) -> Result<ProblemSpec, CmdOutput> {
    match ProblemSpec::parse(text) {
        Ok(mut p) => {
            p.options = p.options.with(ov);
            Ok(p)
        }
        Err(e) => Err(CmdOutput::input_error(&e, ov.format.unwrap_or_default())),
    }
}

/// Decides the problem and reports the verdict.
pub fn cmd_check(text: &str, ov: &Overrides) -> CmdOutput {
    let p = match load(text, ov) {
        Ok(p) => p,
        Err(out) => return out,
    };
    let v = decide_up_to(&p.lambda, &p.d, p.options.precision);
    let report = match p.options.format {
        Format::Json => pretty(&v.to_json()),
        Format::Text => v.to_text(),
    };
    CmdOutput::new(v.outcome.exit_code(), report)
}

/// As [`cmd_check`] with level-function and partial-sum tables.
pub fn cmd_explain(text: &str, ov: &Overrides) -> CmdOutput {
    let p = match load(text, ov) {
        Ok(p) => p,
        Err(out) => return out,
    };
    let r = explain_up_to(&p.lambda, &p.d, p.options.precision);
    let report = match p.options.format {
        Format::Json => pretty(&r.to_json()),
        Format::Text => r.to_text(),
    };
    CmdOutput::new(r.verdict.outcome.exit_code(), report)
}

/// Builder patterns recognized by [`cmd_build`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// Both lists finite: a Schur-Horn matrix.
    Finite { lambda: Vec<Q>, d: Vec<Q> },
    /// One negative eigenvalue against a nonnegative diagonal: the truncated
    /// rotation chain.
    OneNegative { lambda_neg1: Q },
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Finite { .. } => write!(f, "finite Schur-Horn"),
            Pattern::OneNegative { .. } => write!(f, "one negative eigenvalue chain"),
        }
    }
}

/// Matches an instance against the implemented builders, or explains which
/// construction it would need.
pub fn match_pattern(lambda: &ExtendedSequence, d: &ExtendedSequence) -> Result<Pattern, String> {
    if let (ExtNat::Fin(n), ExtNat::Fin(m)) = (lambda.len(), d.len()) {
        if n == m {
            return Ok(Pattern::Finite { lambda: lambda.terms(n), d: d.terms(m) });
        }
        return Err(format!("finite lists of different lengths {n} and {m}"));
    }
    let one_neg = lambda.count_neg() == ExtNat::Fin(1) && lambda.zeros() == ExtNat::ZERO;
    let d_nonneg = d.count_neg() == ExtNat::ZERO && d.zeros() == ExtNat::ZERO;
    if one_neg && d_nonneg && lambda.count_pos().is_inf() && d.count_pos().is_inf() {
        return Ok(Pattern::OneNegative { lambda_neg1: lambda.neg().term(1) });
    }
    let both_sides = lambda.count_pos().is_inf() && lambda.count_neg().is_inf();
    let missing = if both_sides && !lambda.pos().is_summable() && !lambda.neg().is_summable() {
        "the two-sided nonsummable orchestration is not implemented"
    } else if both_sides {
        "the two-sided orchestration is not implemented"
    } else if lambda.zeros() != ExtNat::ZERO {
        "the kernel-splitting orchestration is not implemented"
    } else {
        "the general infinite orchestration is not implemented; builders cover finite lists and a single negative eigenvalue"
    };
    Err(missing.to_string())
}

/// Builds a realizing matrix when the instance is diagonal and matches a
/// builder; the matrix and trace form the artifact, the residuals the report.
pub fn cmd_build(text: &str, ov: &Overrides) -> CmdOutput {
    let p = match load(text, ov) {
        Ok(p) => p,
        Err(out) => return out,
    };
    let fmt = p.options.format;
    let v = decide_up_to(&p.lambda, &p.d, p.options.precision);
    if v.outcome != Outcome::Diagonal {
        return refusal(v.outcome.exit_code(), &format!("instance is not certified diagonal: {}", v.outcome.label()), Some(&v), fmt);
    }
    let pattern = match match_pattern(&p.lambda, &p.d) {
        Ok(pt) => pt,
        Err(why) => return refusal(EXIT_NO_BUILDER, &format!("no applicable builder: {why}"), Some(&v), fmt),
    };
    match build_pattern(&pattern, &p.lambda, &p.d, p.options.truncation) {
        Ok(b) => {
            let ok = b.realization.within(RESIDUAL_TOL);
            let summary = json!({
                "pattern": pattern.to_string(),
                "dimension": b.matrix.n,
                "residuals": b.realization.to_json(),
                "within_tolerance": ok,
                "trace": b.trace.clone(),
            });
            let report = match fmt {
                Format::Json => pretty(&summary),
                Format::Text => {
                    let mut s = format!(
                        "pattern: {}\ndimension: {}\neigen residual: {:e}\ndiagonal residual: {:e}\n",
                        pattern, b.matrix.n, b.realization.eigen_residual, b.realization.diagonal_residual
                    );
                    if let Some(r) = b.trace.get("residual_exact").and_then(Value::as_str) {
                        s.push_str(&format!("residual entry: {r}\n"));
                    }
                    s
                }
            };
            let artifact = match fmt {
                Format::Json => pretty(&json!({"matrix": b.matrix.to_json(), "build": summary})),
                Format::Text => b.matrix.to_text(),
            };
            CmdOutput { code: if ok { 0 } else { EXIT_VIOLATION }, report, artifact: Some(artifact) }
        }
        Err(why) => refusal(EXIT_NO_BUILDER, &format!("builder failed: {why}"), Some(&v), fmt),
    }
}

fn refusal(code: i32, message: &str, v: Option<&Verdict>, fmt: Format) -> CmdOutput {
    let report = match fmt {
        Format::Json => pretty(&json!({"error": "build", "message": message, "verdict": v.map(Verdict::to_json)})),
        Format::Text => format!("{message}\n"),
    };
    CmdOutput::new(code, report)
}

/// Output of a successful build.
#[derive(Clone, Debug, PartialEq)]
pub struct Built {
    pub matrix: Mat,
    pub realization: RealizationReport,
    pub trace: Value,
}

/// Runs the builder for a matched pattern. `truncation` is the number of
/// diagonal entries fixed by the one-negative chain.
pub fn build_pattern(pattern: &Pattern, lambda: &ExtendedSequence, d: &ExtendedSequence, truncation: usize) -> Result<Built, String> {
    match pattern {
        Pattern::Finite { lambda, d } => {
            let m = schur_horn_build(lambda, d).map_err(|e| e.to_string())?;
            let r = verify_realization(&m, lambda, d, RESIDUAL_TOL).map_err(|e| e.to_string())?;
            Ok(Built { matrix: m, realization: r, trace: json!({"eigenvalues": lambda.iter().map(fmt_q).collect::<Vec<_>>()}) })
        }
        Pattern::OneNegative { lambda_neg1 } => build_one_negative(lambda_neg1, lambda, d, truncation),
    }
}

/// Truncated one-negative chain for `λ = (-λ₋₁) ∪ λ⁺` against `d ≥ 0`:
/// fixes `d_1, …, d_N` and leaves `-t_{N+1}` in the last entry.
fn build_one_negative(lambda_neg1: &Q, lambda: &ExtendedSequence, d: &ExtendedSequence, n: usize) -> Result<Built, String> {
    let lp = lambda.pos().terms(n as u64);
    let dp = d.pos().terms(n as u64);
    let t = tbound_build(&lp, &dp, lambda_neg1, n).map_err(|e| e.to_string())?;
    let mut spectrum = vec![-lambda_neg1.clone()];
    spectrum.extend(lp.iter().cloned());
    let m = chain_matrix(&t, &spectrum);
    let mut diag = dp;
    diag.push(t.residual_exact.clone());
    let r = verify_realization(&m, &spectrum, &diag, RESIDUAL_TOL).map_err(|e| e.to_string())?;
    let mut trace = t.to_json();
    trace["residual_magnitude"] = json!(to_f64(&t.residual_exact.abs()));
    trace["diagonal_error"] = json!(t.diagonal_error());
    if let Some(o) = trace.as_object_mut() {
        o.remove("target");
    }
    Ok(Built { matrix: m, realization: r, trace })
}
