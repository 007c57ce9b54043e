//! `equisum` command line: `construct`, `verify`, `check` and `sweep`.
//!
//! Exit codes: 0 success, 1 verification failed, 2 infeasible construction,
//! 3 indeterminate certification, 64 usage, 65 malformed input data,
//! 66 unreadable input, 74 output I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constructions::{ConstructionError, ConstructionRegistry};
use crate::feasibility::{classify, lemma_applies, FeasibilityVerdict, Precision, VerdictKind};
use crate::geometry::simplex_builder;
use crate::mixednorm::{verify_equilateral, PointSet, DEFAULT_REL_TOL};
use crate::realnum::{to_decimal, Rounding, DEFAULT_FLOOR_EXP};
use crate::sweep::{emit_report, run_sweep, BPolicy, ReportFormat, SweepConfig, MARGIN_DIGITS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_IO: i32 = 74;

pub const PRECISION_ENV: &str = "EQUISUM_PRECISION_FLOOR";

#[derive(Debug, Parser)]
#[command(
    name = "equisum",
    version,
    about = "Equilateral sets in l1 sums of Euclidean spaces"
)]
pub struct Cli {
    /// Certification floor exponent: give up on a sign once enclosures are
    /// narrower than 2^-EXP. Overrides EQUISUM_PRECISION_FLOOR.
    #[arg(long, global = true, value_name = "EXP", value_parser = clap::value_parser!(u32).range(1..=100_000))]
    pub precision_floor: Option<u32>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an equilateral set of size a + b + 1 and write it as JSON
    Construct {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        a: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        b: u64,
        /// Output file (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Construction to use; `auto` picks by classification
        #[arg(long, default_value = "auto")]
        method: String,
        /// Regular simplex kernel
        #[arg(long, default_value = "apex")]
        simplex: String,
    },
    /// Check that a point set file is equilateral
    Verify {
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_REL_TOL, value_parser = parse_tolerance)]
        rel_tol: f64,
    },
    /// Classify a pair (a, b) with certified arithmetic
    Check {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        a: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        b: u64,
    },
    /// Classify every pair in a range and report the failures
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        a_min: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        a_max: u64,
        /// Scan b up to this value instead of up to the lemma threshold a² + a
        #[arg(long)]
        b_max: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores)
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1024))]
        threads: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err(format!("tolerance must be positive and finite, got {s}"))
    }
}

/// Verdict summary printed by `check` and embedded in construction errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerdictReport {
    pub a: u64,
    pub b: u64,
    pub swapped: bool,
    pub verdict: VerdictKind,
    pub c: Option<u64>,
    pub alpha: Option<u64>,
    pub beta: Option<u64>,
    pub margin_lo: Option<String>,
    pub margin_hi: Option<String>,
    pub lemma_covered: bool,
}

impl VerdictReport {
    pub fn new(a: u64, b: u64, v: &FeasibilityVerdict) -> Self {
        let (lo, hi) = (a.min(b), a.max(b));
        VerdictReport {
            a,
            b,
            swapped: v.swapped,
            verdict: v.kind,
            c: v.params.map(|p| p.c),
            alpha: v.params.map(|p| p.alpha),
            beta: v.params.map(|p| p.beta),
            margin_lo: v
                .margin
                .as_ref()
                .map(|m| to_decimal(m.lo(), MARGIN_DIGITS, Rounding::Floor)),
            margin_hi: v
                .margin
                .as_ref()
                .map(|m| to_decimal(m.hi(), MARGIN_DIGITS, Rounding::Ceil)),
            lemma_covered: lo >= 2 && hi > lo && lemma_applies(lo, hi),
        }
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody<'a> {
    error: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<VerdictReport>,
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn error_json(kind: &str, message: impl ToString, verdict: Option<VerdictReport>) -> String {
    json_line(&ErrorBody {
        error: kind,
        message: message.to_string(),
        verdict,
    })
}

fn precision_from(flag: Option<u32>, env: Option<&str>) -> Result<Precision, String> {
    let floor_exp = match (flag, env) {
        (Some(exp), _) => exp,
        (None, Some(raw)) => match raw.trim().parse::<u32>() {
            Ok(exp) if exp >= 1 => exp,
            _ => {
                return Err(format!(
                    "{PRECISION_ENV} must be a positive integer, got `{raw}`"
                ))
            }
        },
        (None, None) => DEFAULT_FLOOR_EXP,
    };
    Ok(Precision { floor_exp })
}

fn emit(out_path: Option<&Path>, body: &str, stdout: &mut dyn Write) -> io::Result<()> {
    match out_path {
        Some(path) => fs::write(path, body),
        None => stdout.write_all(body.as_bytes()),
    }
}

/// Runs the CLI against the process environment and standard streams.
pub fn run_from_env() -> i32 {
    let env = std::env::var(PRECISION_ENV).ok();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(
        std::env::args_os(),
        env.as_deref(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

/// Runs the CLI with explicit arguments, precision-floor environment value and
/// output streams. Returns the process exit code.
pub fn run<I, T>(
    args: I,
    precision_env: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    let precision = match precision_from(cli.precision_floor, precision_env) {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };

    match cli.command {
        Command::Construct {
            a,
            b,
            out,
            method,
            simplex,
        } => cmd_construct(
            a,
            b,
            out.as_deref(),
            &method,
            &simplex,
            precision,
            stdout,
            stderr,
        ),
        Command::Verify { input, rel_tol } => cmd_verify(&input, rel_tol, stdout, stderr),
        Command::Check { a, b } => cmd_check(a, b, precision, stdout, stderr),
        Command::Sweep {
            a_min,
            a_max,
            b_max,
            format,
            out,
            threads,
        } => {
            let config = SweepConfig {
                a_min,
                a_max,
                b_policy: b_max.map_or(BPolicy::UpToLemma, BPolicy::Explicit),
                precision,
            };
            cmd_sweep(&config, format, out.as_deref(), threads, stdout, stderr)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    a: u64,
    b: u64,
    out: Option<&Path>,
    method: &str,
    simplex: &str,
    precision: Precision,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let kernel = match simplex_builder(simplex) {
        Ok(k) => k,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let registry = ConstructionRegistry::with_defaults()
        .with_simplex(Arc::from(kernel))
        .with_precision(precision);
    let result = if method == "auto" {
        registry.construct(a, b)
    } else {
        registry.construct_with(method, a, b)
    };
    let result = match result {
        Ok(r) => r,
        Err(ConstructionError::Infeasible { a, b, verdict }) => {
            let code = if verdict.kind == VerdictKind::Indeterminate {
                EXIT_INDETERMINATE
            } else {
                EXIT_INFEASIBLE
            };
            let report = VerdictReport::new(a, b, &verdict);
            let msg = format!(
                "no equilateral set of size {} from the known constructions",
                a + b + 1
            );
            let _ = stdout
                .write_all(error_json("InfeasibleConstruction", &msg, Some(report)).as_bytes());
            let _ = writeln!(stderr, "({a}, {b}): {}", verdict.kind);
            return code;
        }
        Err(e @ (ConstructionError::NotApplicable { .. } | ConstructionError::Unknown(_))) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_DATA;
        }
    };
    let body = {
        let mut s = result.point_set.to_json();
        s.push('\n');
        s
    };
    if let Err(e) = emit(out, &body, stdout) {
        let _ = writeln!(stderr, "error: writing output: {e}");
        return EXIT_IO;
    }
    let _ = writeln!(
        stderr,
        "{}: {} points in E^{} (+)_1 E^{}",
        result.point_set.provenance,
        result.len(),
        result.point_set.a,
        result.point_set.b
    );
    EXIT_OK
}

fn cmd_verify(input: &Path, rel_tol: f64, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let text = match fs::read_to_string(input) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: reading {}: {e}", input.display());
            return EXIT_NO_INPUT;
        }
    };
    let set = match PointSet::from_json(&text) {
        Ok(s) => s,
        Err(e) => {
            let _ = stderr.write_all(error_json("MalformedPointSet", e, None).as_bytes());
            return EXIT_DATA;
        }
    };
    let report = match verify_equilateral(&set, rel_tol) {
        Ok(r) => r,
        Err(e) => {
            let _ = stderr.write_all(error_json("MalformedPointSet", e, None).as_bytes());
            return EXIT_DATA;
        }
    };
    if stdout.write_all(json_line(&report).as_bytes()).is_err() {
        return EXIT_IO;
    }
    if report.pass {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    }
}

fn cmd_check(
    a: u64,
    b: u64,
    precision: Precision,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let verdict = match classify(a, b, precision) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = VerdictReport::new(a, b, &verdict);
    if stdout.write_all(json_line(&report).as_bytes()).is_err() {
        return EXIT_IO;
    }
    if verdict.kind.is_conclusive() {
        EXIT_OK
    } else {
        EXIT_INDETERMINATE
    }
}

fn cmd_sweep(
    config: &SweepConfig,
    format: Format,
    out: Option<&Path>,
    threads: Option<u64>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let run = || run_sweep(config);
    let report = match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(e) => {
                let _ = writeln!(stderr, "error: thread pool: {e}");
                return EXIT_USAGE;
            }
        },
        None => run(),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let body = emit_report(
        &report,
        match format {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        },
    );
    if let Err(e) = emit(out, &body, stdout) {
        let _ = writeln!(stderr, "error: writing output: {e}");
        return EXIT_IO;
    }
    let _ = writeln!(
        stderr,
        "{} records, {} failing, {} indeterminate in {:.2?}",
        report.records.len(),
        report.failing_pairs.len(),
        report.indeterminate_pairs.len(),
        report.elapsed
    );
    if report.conclusive {
        EXIT_OK
    } else {
        EXIT_INDETERMINATE
    }
}
