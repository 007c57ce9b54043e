//! Block parameters `(c, α, β)` for a pair `(a, b)` and certified decisions of
//! whether the block-simplex configuration fits in `E^a`.
//!
//! The three separations needed in the `E^a` factor are
//!
//! * `f(n) = 1 − sqrt(n/(n+1))` between points sharing a `c`-simplex family
//!   (`f(c)`) or a `(c−1)`-simplex family (`f(c−1)`),
//! * `g(c) = 1 − sqrt((1/2)((c−1)/c + c/(c+1)))` across the two families,
//!
//! and the configuration exists iff
//! `d²_{α−1}·f(c−1)² + d²_{β−1}·f(c)² ≤ g(c)²`. All `d²` terms are exact
//! rationals, so only `f` and `g` are enclosed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::circumradius_sq;
use crate::realnum::{
    certified_sign, enclose_sqrt, int, pow2_inv, rat, Certified, Enclosure, Rational, RealError,
    Sign, DEFAULT_FLOOR_EXP,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("need b > a >= 2, got a = {a}, b = {b}")]
    OutOfScope { a: u64, b: u64 },
    #[error("dimensions must be positive, got a = {a}, b = {b}")]
    ZeroDimension { a: u64, b: u64 },
    #[error("{0}")]
    Domain(String),
    #[error("inequality check needs 2 <= beta <= a - 1, got beta = {beta} for a = {a}")]
    NotMainCase { a: u64, beta: u64 },
    #[error(transparent)]
    Real(#[from] RealError),
}

/// Refinement floor for certified signs, as an exponent: the floor is `2^-floor_exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub floor_exp: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            floor_exp: DEFAULT_FLOOR_EXP,
        }
    }
}

impl Precision {
    pub fn floor(&self) -> Rational {
        pow2_inv(self.floor_exp)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parameters {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub alpha: u64,
    pub beta: u64,
}

/// `c = ⌊1 + b/(a+1)⌋`, `β = b mod (a+1)`, `α = a + 1 − β`.
pub fn derive_parameters(a: u64, b: u64) -> Result<Parameters, FeasibilityError> {
    if a < 2 || b <= a {
        return Err(FeasibilityError::OutOfScope { a, b });
    }
    let c = 1 + b / (a + 1);
    let beta = b % (a + 1);
    Ok(Parameters {
        a,
        b,
        c,
        alpha: a + 1 - beta,
        beta,
    })
}

impl Parameters {
    pub fn is_beta_trivial(&self) -> bool {
        self.beta == 0 || self.beta == 1 || self.beta == self.a
    }
}

/// Radicand of `f(n)`, i.e. `n/(n+1)`.
pub fn f_radicand(n: u64) -> Rational {
    let n = n as i64;
    rat(n, n + 1)
}

/// Radicand of `g(c)`, i.e. `((c−1)/c + c/(c+1)) / 2`.
pub fn g_radicand(c: u64) -> Rational {
    let c = c as i64;
    (rat(c - 1, c) + rat(c, c + 1)) / int(2)
}

/// Encloses `f(n) = 1 − sqrt(n/(n+1))` with width at most `eps`.
pub fn f_enclosure(n: u64, eps: &Rational) -> Result<Enclosure, FeasibilityError> {
    if n < 1 {
        return Err(FeasibilityError::Domain(format!(
            "f(n) needs n >= 1, got {n}"
        )));
    }
    Ok(enclose_sqrt(&f_radicand(n), eps)?.rsub(&int(1)))
}

/// Encloses `g(c) = 1 − sqrt(((c−1)/c + c/(c+1))/2)` with width at most `eps`.
pub fn g_enclosure(c: u64, eps: &Rational) -> Result<Enclosure, FeasibilityError> {
    if c < 2 {
        return Err(FeasibilityError::Domain(format!(
            "g(c) needs c >= 2, got {c}"
        )));
    }
    Ok(enclose_sqrt(&g_radicand(c), eps)?.rsub(&int(1)))
}

/// `f(n)` in binary64, computed as `(1/(n+1)) / (1 + sqrt(n/(n+1)))` so that
/// no cancellation occurs for large `n`.
pub fn f_value(n: u64) -> f64 {
    let n = n as f64;
    (1.0 / (n + 1.0)) / (1.0 + (n / (n + 1.0)).sqrt())
}

/// `g(c)` in binary64, cancellation-free like [`f_value`].
pub fn g_value(c: u64) -> f64 {
    let c = c as f64;
    let one_minus = 0.5 * (1.0 / c + 1.0 / (c + 1.0));
    one_minus / (1.0 + (1.0 - one_minus).sqrt())
}

/// Encloses `g(c)² − d²_{α−1}·f(c−1)² − d²_{β−1}·f(c)²` for any `1 <= β`,
/// `1 <= α` (with `d_0 = 0`).
pub fn inequality_margin(p: &Parameters, eps: &Rational) -> Result<Enclosure, FeasibilityError> {
    if p.alpha == 0 || p.beta == 0 {
        return Err(FeasibilityError::Domain(format!(
            "margin needs alpha, beta >= 1, got alpha = {}, beta = {}",
            p.alpha, p.beta
        )));
    }
    let g2 = g_enclosure(p.c, eps)?.square();
    let fw2 = f_enclosure(p.c - 1, eps)?.square();
    let fz2 = f_enclosure(p.c, eps)?.square();
    let lhs = &fw2.scale(&circumradius_sq(p.alpha - 1)) + &fz2.scale(&circumradius_sq(p.beta - 1));
    Ok(&g2 - &lhs)
}

/// How a pair `(a, b)` is settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    /// One factor is `E^1`.
    Prop1,
    /// Equal dimensions: cross-polytope plus apex.
    Prop2,
    /// `β ∈ {0, 1, a}`; always realisable.
    BetaTrivial(u64),
    InequalityHolds,
    InequalityFails,
    Indeterminate,
}

impl VerdictKind {
    /// True when the pair comes with an explicit equilateral set of size
    /// `a + b + 1`.
    pub fn is_constructible(&self) -> bool {
        !matches!(
            self,
            VerdictKind::InequalityFails | VerdictKind::Indeterminate
        )
    }

    pub fn is_conclusive(&self) -> bool {
        !matches!(self, VerdictKind::Indeterminate)
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::Prop1 => f.write_str("Prop1"),
            VerdictKind::Prop2 => f.write_str("Prop2"),
            VerdictKind::BetaTrivial(beta) => write!(f, "BetaTrivial({beta})"),
            VerdictKind::InequalityHolds => f.write_str("InequalityHolds"),
            VerdictKind::InequalityFails => f.write_str("InequalityFails"),
            VerdictKind::Indeterminate => f.write_str("Indeterminate"),
        }
    }
}

impl FromStr for VerdictKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "Prop1" => VerdictKind::Prop1,
            "Prop2" => VerdictKind::Prop2,
            "InequalityHolds" => VerdictKind::InequalityHolds,
            "InequalityFails" => VerdictKind::InequalityFails,
            "Indeterminate" => VerdictKind::Indeterminate,
            other => {
                let beta = other
                    .strip_prefix("BetaTrivial(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| format!("unknown verdict `{other}`"))?;
                VerdictKind::BetaTrivial(beta)
            }
        })
    }
}

impl Serialize for VerdictKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VerdictKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub kind: VerdictKind,
    /// Parameters of the (possibly swapped) pair with `a < b`, when the block
    /// construction is the relevant one.
    pub params: Option<Parameters>,
    /// Enclosure of `g(c)² − d²_{α−1}f(c−1)² − d²_{β−1}f(c)²` on the
    /// deciding refinement round.
    pub margin: Option<Enclosure>,
    /// The caller's `(a, b)` was exchanged to reach `a <= b`.
    pub swapped: bool,
}

impl FeasibilityVerdict {
    fn simple(kind: VerdictKind, params: Option<Parameters>) -> Self {
        FeasibilityVerdict {
            kind,
            params,
            margin: None,
            swapped: false,
        }
    }
}

/// Certified decision of the main-case inequality.
///
/// A margin enclosure with `lo >= 0` counts as holding (the inequality is not
/// strict); anything still straddling zero at the floor is `Indeterminate`.
pub fn check_inequality(
    p: &Parameters,
    precision: Precision,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    if p.beta < 2 || p.beta + 1 > p.a {
        return Err(FeasibilityError::NotMainCase {
            a: p.a,
            beta: p.beta,
        });
    }
    certify_inequality(p, precision)
}

fn certify_inequality(
    p: &Parameters,
    precision: Precision,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    // surface parameter errors before entering the refinement loop
    inequality_margin(p, &precision.floor())?;
    let cert = certified_sign(
        |eps| inequality_margin(p, eps).expect("validated parameters"),
        &precision.floor(),
    );
    let kind = match cert.sign {
        Sign::Positive => VerdictKind::InequalityHolds,
        Sign::Negative => VerdictKind::InequalityFails,
        Sign::Indeterminate if cert.enclosure.lo() >= &int(0) => VerdictKind::InequalityHolds,
        Sign::Indeterminate => VerdictKind::Indeterminate,
    };
    Ok(FeasibilityVerdict {
        kind,
        params: Some(*p),
        margin: Some(cert.enclosure),
        swapped: false,
    })
}

/// Decides which construction (if any) yields `a + b + 1` equidistant points.
pub fn classify(
    a: u64,
    b: u64,
    precision: Precision,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    if a == 0 || b == 0 {
        return Err(FeasibilityError::ZeroDimension { a, b });
    }
    if a > b {
        let mut verdict = classify(b, a, precision)?;
        verdict.swapped = true;
        return Ok(verdict);
    }
    if a == 1 {
        return Ok(FeasibilityVerdict::simple(VerdictKind::Prop1, None));
    }
    if a == b {
        return Ok(FeasibilityVerdict::simple(VerdictKind::Prop2, None));
    }
    let p = derive_parameters(a, b)?;
    if p.is_beta_trivial() {
        return Ok(FeasibilityVerdict::simple(
            VerdictKind::BetaTrivial(p.beta),
            Some(p),
        ));
    }
    check_inequality(&p, precision)
}

/// `b >= a² + a`, the range where the inequality is known to hold for every `b`.
pub fn lemma_applies(a: u64, b: u64) -> bool {
    b >= a * a + a
}

/// Exact check that `d²_{α−1} + d²_{β−1} <= (a−1)/(a+1)` for every
/// `β ∈ [2, a−1]`, `α = a + 1 − β`.
pub fn lemma_d2_bound(a: u64) -> bool {
    let bound = rat(a as i64 - 1, a as i64 + 1);
    (2..a).all(|beta| circumradius_sq(a - beta) + circumradius_sq(beta - 1) <= bound)
}

/// Encloses `g(a)² − ((a−1)/(a+1))·f(a−1)²`.
pub fn lemma_margin(a: u64, eps: &Rational) -> Result<Enclosure, FeasibilityError> {
    if a < 2 {
        return Err(FeasibilityError::Domain(format!(
            "lemma needs a >= 2, got {a}"
        )));
    }
    let g2 = g_enclosure(a, eps)?.square();
    let f2 = f_enclosure(a - 1, eps)?.square();
    Ok(&g2 - &f2.scale(&rat(a as i64 - 1, a as i64 + 1)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaCertificate {
    pub a: u64,
    /// Sign of `g(a)² − ((a−1)/(a+1))·f(a−1)²`; must be positive.
    pub margin: Certified,
    pub d2_bound_holds: bool,
}

impl LemmaCertificate {
    pub fn holds(&self) -> bool {
        self.margin.sign == Sign::Positive && self.d2_bound_holds
    }
}

/// Certifies the two facts behind "`b >= a² + a` implies the inequality" for
/// one `a`.
pub fn lemma_certificate(
    a: u64,
    precision: Precision,
) -> Result<LemmaCertificate, FeasibilityError> {
    lemma_margin(a, &precision.floor())?;
    let margin = certified_sign(
        |eps| lemma_margin(a, eps).expect("a >= 2"),
        &precision.floor(),
    );
    Ok(LemmaCertificate {
        a,
        margin,
        d2_bound_holds: lemma_d2_bound(a),
    })
}

/// Sign of `2·g(c)² − f(c−1)²`: positive means the single-point offset in the
/// `β ∈ {1, a}` cases is real.
pub fn beta_one_slack(c: u64, precision: Precision) -> Result<Certified, FeasibilityError> {
    let eval = |eps: &Rational| -> Result<Enclosure, FeasibilityError> {
        let g2 = g_enclosure(c, eps)?.square().scale(&int(2));
        Ok(&g2 - &f_enclosure(c - 1, eps)?.square())
    };
    eval(&precision.floor())?;
    Ok(certified_sign(
        |eps| eval(eps).expect("c >= 2"),
        &precision.floor(),
    ))
}

/// Sign of `f(n) − f(n+1)`.
pub fn f_decrease(n: u64, precision: Precision) -> Result<Certified, FeasibilityError> {
    let eval = |eps: &Rational| -> Result<Enclosure, FeasibilityError> {
        Ok(&f_enclosure(n, eps)? - &f_enclosure(n + 1, eps)?)
    };
    eval(&precision.floor())?;
    Ok(certified_sign(
        |eps| eval(eps).expect("n >= 1"),
        &precision.floor(),
    ))
}

/// Sign of `(g(c+1)/f(c))² − (g(c)/f(c−1))²`, evaluated without division as
/// `g(c+1)²·f(c−1)² − g(c)²·f(c)²`.
pub fn lemma_ratio_increase(c: u64, precision: Precision) -> Result<Certified, FeasibilityError> {
    let eval = |eps: &Rational| -> Result<Enclosure, FeasibilityError> {
        let next = &g_enclosure(c + 1, eps)?.square() * &f_enclosure(c - 1, eps)?.square();
        let this = &g_enclosure(c, eps)?.square() * &f_enclosure(c, eps)?.square();
        Ok(&next - &this)
    };
    eval(&precision.floor())?;
    Ok(certified_sign(
        |eps| eval(eps).expect("c >= 2"),
        &precision.floor(),
    ))
}
