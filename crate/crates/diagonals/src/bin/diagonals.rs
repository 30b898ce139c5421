use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use diagonals::cli::{cmd_build, cmd_check, cmd_explain, cmd_oracle, CmdOutput, Format, OracleParams, Overrides, EXIT_INPUT};

/// Decide which sequences are diagonals of a compact self-adjoint operator
/// with a given eigenvalue list, and build finite realizations.
///
/// Problem files are JSON: {"lambda": SEQ, "d": SEQ, "options": {...}} where
/// SEQ = {"prefix": ["p/q", ...], "pos_tail": TAIL, "neg_tail": TAIL,
/// "zeros": n | "inf"} and TAIL is {"kind": "geometric", "first", "ratio"},
/// {"kind": "power", "coef", "exponent", "offset"}, {"kind": "multi",
/// "components": [...]} or {"kind": "zero"}. Negative tails list magnitudes.
///
/// Exit codes: 0 diagonal / success, 1 not diagonal, 2 kernel inconclusive,
/// 3 precision unknown, 4 oracle or residual violation, 5 no builder,
/// 64 input error.
#[derive(Parser, Debug)]
#[command(name = "diagonals", version)]
struct Cli {
    /// Highest work level: 1 = (10^4 terms, 64 knots), 2 = (10^5, 512), 3 = (10^6, 16384).
    #[arg(long, global = true, value_parser = clap::value_parser!(u8).range(1..=3))]
    precision: Option<u8>,
    /// Number of diagonal entries fixed by truncated chain builds.
    #[arg(long, global = true)]
    truncation: Option<usize>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    format: Option<Fmt>,
    /// Write the report (or, for `build`, the matrix artifact) to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Fmt {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether d is a diagonal; the exit code carries the outcome.
    Check {
        /// Problem file, or `-` for stdin.
        spec: String,
    },
    /// As `check`, with level-function and partial-sum tables.
    Explain { spec: String },
    /// Build a realizing matrix (finite lists, or one negative eigenvalue).
    Build { spec: String },
    /// Run a randomized property suite.
    Oracle {
        /// lr-equivalence, schur-horn-roundtrip or transformer-postconditions.
        kind: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of pairs (lr-equivalence).
        #[arg(long, default_value_t = 200)]
        n: usize,
        /// Matrix dimension (schur-horn-roundtrip).
        #[arg(long, default_value_t = 8)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// convmove, midseq, midseq-case1, midseq-case2, fis, fiz, exequal, one-neg or all.
        #[arg(long, default_value = "all")]
        transform: String,
    },
}

fn read_spec(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| e.to_string())?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format.map(|f| match f {
        Fmt::Json => Format::Json,
        Fmt::Text => Format::Text,
    });
    let ov = Overrides { precision: cli.precision, truncation: cli.truncation, format };
    let out = match &cli.command {
        Command::Check { spec } | Command::Explain { spec } | Command::Build { spec } => match read_spec(spec) {
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INPUT as u8);
            }
            Ok(text) => match cli.command {
                Command::Check { .. } => cmd_check(&text, &ov),
                Command::Explain { .. } => cmd_explain(&text, &ov),
                _ => cmd_build(&text, &ov),
            },
        },
        Command::Oracle { kind, seed, n, dim, trials, transform } => {
            let params = OracleParams { seed: *seed, n: *n, dim: *dim, trials: *trials, transform: transform.clone() };
            cmd_oracle(kind, &params, format.unwrap_or_default())
        }
    };
    emit(&out, cli.out.as_ref())
}

/// Writes to stdout; a closed pipe is not an error.
fn put(s: &str) {
    let _ = std::io::stdout().write_all(s.as_bytes());
}

fn emit(out: &CmdOutput, path: Option<&PathBuf>) -> ExitCode {
    match (path, &out.artifact) {
        (Some(p), Some(a)) => {
            if let Err(e) = std::fs::write(p, a) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
            put(&out.report);
        }
        (Some(p), None) => {
            if let Err(e) = std::fs::write(p, &out.report) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(EXIT_INPUT as u8);
            }
            if out.code != 0 {
                eprint!("{}", out.report);
            }
        }
        (None, Some(a)) => {
            put(&out.report);
            put(a);
        }
        (None, None) => put(&out.report),
    }
    ExitCode::from(out.code as u8)
}
