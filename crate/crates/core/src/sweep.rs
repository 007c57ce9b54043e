//! Scans of the `(a, b)` parameter plane.
//!
//! Pairs are independent, so they are classified in parallel; results are
//! collected in `(a, b)` order so the report is identical however many threads
//! ran it. Wall-clock time is kept on the report but never serialized.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::feasibility::{
    classify, derive_parameters, lemma_applies, lemma_certificate, FeasibilityError, Precision,
    VerdictKind,
};
use crate::realnum::{to_decimal, Rounding};

/// Fractional digits used when rendering margin endpoints.
pub const MARGIN_DIGITS: u32 = 30;

pub const CSV_HEADER: &str = "a,b,c,alpha,beta,verdict,margin_lo,margin_hi,lemma_covered";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("need 2 <= a_min <= a_max, got a_min = {a_min}, a_max = {a_max}")]
    BadRange { a_min: u64, a_max: u64 },
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BPolicy {
    /// `b` up to `a² + a − 1`, plus one lemma-covered record at `b = a² + a`.
    UpToLemma,
    /// Every `b` in `(a, b_max]`.
    Explicit(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub a_min: u64,
    pub a_max: u64,
    pub b_policy: BPolicy,
    pub precision: Precision,
}

impl SweepConfig {
    pub fn up_to_lemma(a_min: u64, a_max: u64) -> Self {
        SweepConfig {
            a_min,
            a_max,
            b_policy: BPolicy::UpToLemma,
            precision: Precision::default(),
        }
    }

    pub fn explicit(a_min: u64, a_max: u64, b_max: u64) -> Self {
        SweepConfig {
            b_policy: BPolicy::Explicit(b_max),
            ..Self::up_to_lemma(a_min, a_max)
        }
    }

    fn validate(&self) -> Result<(), SweepError> {
        if self.a_min < 2 || self.a_min > self.a_max {
            return Err(SweepError::BadRange {
                a_min: self.a_min,
                a_max: self.a_max,
            });
        }
        Ok(())
    }

    /// Pairs to decide, in `(a, b)` order.
    fn pairs(&self) -> Vec<(u64, u64)> {
        (self.a_min..=self.a_max)
            .flat_map(|a| {
                let b_max = match self.b_policy {
                    BPolicy::UpToLemma => a * a + a - 1,
                    BPolicy::Explicit(b_max) => b_max,
                };
                (a + 1..=b_max).map(move |b| (a, b))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub alpha: u64,
    pub beta: u64,
    pub verdict: VerdictKind,
    pub margin_lo: Option<String>,
    pub margin_hi: Option<String>,
    pub lemma_covered: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub a: u64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub conclusive: bool,
    pub failing_pairs: Vec<(u64, u64)>,
    pub indeterminate_pairs: Vec<(u64, u64)>,
    pub lemma_checks: Vec<LemmaCheck>,
    pub records: Vec<SweepRecord>,
    #[serde(skip)]
    pub elapsed: Duration,
}

// wall-clock time is not part of a report's identity
impl PartialEq for SweepReport {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.conclusive == other.conclusive
            && self.failing_pairs == other.failing_pairs
            && self.indeterminate_pairs == other.indeterminate_pairs
            && self.lemma_checks == other.lemma_checks
            && self.records == other.records
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

fn record(a: u64, b: u64, precision: Precision) -> Result<SweepRecord, FeasibilityError> {
    let p = derive_parameters(a, b)?;
    let verdict = classify(a, b, precision)?;
    let (margin_lo, margin_hi) = match &verdict.margin {
        Some(m) => (
            Some(to_decimal(m.lo(), MARGIN_DIGITS, Rounding::Floor)),
            Some(to_decimal(m.hi(), MARGIN_DIGITS, Rounding::Ceil)),
        ),
        None => (None, None),
    };
    Ok(SweepRecord {
        a,
        b,
        c: p.c,
        alpha: p.alpha,
        beta: p.beta,
        verdict: verdict.kind,
        margin_lo,
        margin_hi,
        lemma_covered: lemma_applies(a, b),
    })
}

fn map_ordered<T, U, F>(items: &[T], exec: Execution, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        Execution::Serial => items.iter().map(f).collect(),
        Execution::Parallel => items.par_iter().map(f).collect(),
    }
}

pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport, SweepError> {
    run_sweep_with(config, Execution::Parallel)
}

pub fn run_sweep_with(config: &SweepConfig, exec: Execution) -> Result<SweepReport, SweepError> {
    config.validate()?;
    let start = Instant::now();
    let precision = config.precision;

    let mut pairs = config.pairs();
    let a_values: Vec<u64> = (config.a_min..=config.a_max).collect();
    let mut lemma_checks = Vec::new();
    if config.b_policy == BPolicy::UpToLemma {
        // b = a² + a has β = 0, so this boundary record is cheap and exact
        pairs.extend(a_values.iter().map(|&a| (a, a * a + a)));
        pairs.sort_unstable();
        lemma_checks = map_ordered(&a_values, exec, |&a| {
            lemma_certificate(a, precision).map(|cert| LemmaCheck {
                a,
                holds: cert.holds(),
            })
        })
        .into_iter()
        .collect::<Result<_, _>>()?;
    }

    let records: Vec<SweepRecord> = map_ordered(&pairs, exec, |&(a, b)| record(a, b, precision))
        .into_iter()
        .collect::<Result<_, _>>()?;

    let pairs_with = |kind: VerdictKind| -> Vec<(u64, u64)> {
        records
            .iter()
            .filter(|r| r.verdict == kind)
            .map(|r| (r.a, r.b))
            .collect()
    };
    let failing_pairs = pairs_with(VerdictKind::InequalityFails);
    let indeterminate_pairs = pairs_with(VerdictKind::Indeterminate);
    let conclusive = indeterminate_pairs.is_empty() && lemma_checks.iter().all(|c| c.holds);

    Ok(SweepReport {
        config: *config,
        conclusive,
        failing_pairs,
        indeterminate_pairs,
        lemma_checks,
        records,
        elapsed: start.elapsed(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn emit_report(r: &SweepReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut out = String::new();
            out.push_str(CSV_HEADER);
            out.push('\n');
            for rec in &r.records {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    rec.a,
                    rec.b,
                    rec.c,
                    rec.alpha,
                    rec.beta,
                    rec.verdict,
                    rec.margin_lo.as_deref().unwrap_or(""),
                    rec.margin_hi.as_deref().unwrap_or(""),
                    rec.lemma_covered
                )
                .expect("writing to a String cannot fail");
            }
            out
        }
    }
}

pub fn parse_json_report(s: &str) -> Result<SweepReport, serde_json::Error> {
    serde_json::from_str(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_report() -> SweepReport {
        SweepReport {
            config: SweepConfig::explicit(2, 2, 2),
            conclusive: true,
            failing_pairs: vec![],
            indeterminate_pairs: vec![],
            lemma_checks: vec![],
            records: vec![],
            elapsed: Duration::ZERO,
        }
    }

    #[test]
    fn explicit_range_counts() {
        let r = run_sweep(&SweepConfig::explicit(2, 2, 5)).unwrap();
        let bs: Vec<u64> = r.records.iter().map(|r| r.b).collect();
        assert_eq!(bs, vec![3, 4, 5]);
        assert!(r.conclusive);
        assert!(r.lemma_checks.is_empty());
    }

    #[test]
    fn lemma_policy_appends_boundary_record() {
        let r = run_sweep(&SweepConfig::up_to_lemma(3, 3)).unwrap();
        let last = r.records.last().unwrap();
        assert_eq!((last.a, last.b), (3, 12));
        assert!(last.lemma_covered);
        assert_eq!(last.verdict, VerdictKind::BetaTrivial(0));
        assert_eq!(r.records.len(), 12 - 3);
        assert!(r.records[..r.records.len() - 1]
            .iter()
            .all(|x| !x.lemma_covered));
        assert_eq!(r.lemma_checks, vec![LemmaCheck { a: 3, holds: true }]);
    }

    #[test]
    fn bad_range_rejected() {
        assert!(matches!(
            run_sweep(&SweepConfig::up_to_lemma(1, 4)),
            Err(SweepError::BadRange { .. })
        ));
        assert!(matches!(
            run_sweep(&SweepConfig::up_to_lemma(5, 4)),
            Err(SweepError::BadRange { .. })
        ));
    }

    #[test]
    fn a28_single_failure() {
        let r = run_sweep(&SweepConfig::up_to_lemma(28, 28)).unwrap();
        assert_eq!(r.failing_pairs, vec![(28, 40)]);
        assert!(r.conclusive);
        let rec = r.records.iter().find(|x| x.b == 40).unwrap();
        assert!(rec.margin_hi.as_deref().unwrap().starts_with('-'));
    }

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(
            emit_report(&empty_report(), ReportFormat::Csv),
            format!("{CSV_HEADER}\n")
        );
    }

    #[test]
    fn single_record_csv() {
        let mut r = empty_report();
        r.records.push(SweepRecord {
            a: 5,
            b: 8,
            c: 2,
            alpha: 4,
            beta: 2,
            verdict: VerdictKind::InequalityHolds,
            margin_lo: Some("0.1".into()),
            margin_hi: Some("0.2".into()),
            lemma_covered: false,
        });
        let csv = emit_report(&r, ReportFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(
            lines,
            vec![CSV_HEADER, "5,8,2,4,2,InequalityHolds,0.1,0.2,false"]
        );
    }

    #[test]
    fn json_round_trip() {
        let r = run_sweep(&SweepConfig::up_to_lemma(2, 4)).unwrap();
        let parsed = parse_json_report(&emit_report(&r, ReportFormat::Json)).unwrap();
        assert_eq!(parsed, r);
    }

    #[test]
    fn serial_and_parallel_agree() {
        let cfg = SweepConfig::up_to_lemma(2, 9);
        let s = run_sweep_with(&cfg, Execution::Serial).unwrap();
        let p = run_sweep_with(&cfg, Execution::Parallel).unwrap();
        assert_eq!(
            emit_report(&s, ReportFormat::Json),
            emit_report(&p, ReportFormat::Json)
        );
    }
}
