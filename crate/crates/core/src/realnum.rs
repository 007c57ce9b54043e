//! Exact rationals and certified rational enclosures of real values.
//!
//! Every sign decision made by the feasibility checks goes through this module.
//! Nothing here touches floating point: irrational quantities are carried as
//! closed intervals with rational endpoints, and every operation rounds outward
//! so the true value is always inside.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision fraction, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Exponent of the first tolerance tried by [`certified_sign`] (2^-20).
pub const START_EPS_EXP: u32 = 20;

/// Default exponent of the refinement floor (2^-200).
pub const DEFAULT_FLOOR_EXP: u32 = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealError {
    #[error("square root of negative rational {0}")]
    NegativeRadicand(Rational),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(Rational),
    #[error("enclosure endpoints out of order: [{lo}, {hi}]")]
    Inverted {
        lo: Box<Rational>,
        hi: Box<Rational>,
    },
}

/// `n / d` as a canonical rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `2^-k`.
pub fn pow2_inv(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << k)
}

fn is_perfect_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    Floor,
    Ceil,
}

/// Renders `q` with exactly `digits` fractional decimal digits, rounded in the
/// requested direction so that a floored lower bound and a ceiled upper bound
/// still enclose the original value.
pub fn to_decimal(q: &Rational, digits: u32, rounding: Rounding) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = q * Rational::from_integer(scale.clone());
    let n = match rounding {
        Rounding::Floor => scaled.numer().div_floor(scaled.denom()),
        Rounding::Ceil => -((-scaled.numer()).div_floor(scaled.denom())),
    };
    let sign = if n.is_negative() { "-" } else { "" };
    let (whole, frac) = n.abs().div_rem(&scale);
    if digits == 0 {
        return format!("{sign}{whole}");
    }
    format!("{sign}{whole}.{frac:0>width$}", width = digits as usize)
}

/// A closed interval `[lo, hi]` with rational endpoints known to contain some
/// real value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Enclosure {
    lo: Rational,
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, RealError> {
        if lo > hi {
            return Err(RealError::Inverted {
                lo: Box::new(lo),
                hi: Box::new(hi),
            });
        }
        Ok(Enclosure { lo, hi })
    }

    /// Degenerate enclosure of an exactly known value.
    pub fn point(q: Rational) -> Self {
        Enclosure {
            lo: q.clone(),
            hi: q,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, q: &Rational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Tight enclosure of `{x^2 : x in self}`. Unlike `self * self` this
    /// never dips below zero.
    pub fn square(&self) -> Enclosure {
        let l2 = &self.lo * &self.lo;
        let h2 = &self.hi * &self.hi;
        if !self.lo.is_positive() && !self.hi.is_negative() {
            Enclosure {
                lo: Rational::zero(),
                hi: l2.max(h2),
            }
        } else if l2 <= h2 {
            Enclosure { lo: l2, hi: h2 }
        } else {
            Enclosure { lo: h2, hi: l2 }
        }
    }

    pub fn scale(&self, k: &Rational) -> Enclosure {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Enclosure { lo: a, hi: b }
        } else {
            Enclosure { lo: b, hi: a }
        }
    }

    /// `k - self`.
    pub fn rsub(&self, k: &Rational) -> Enclosure {
        Enclosure {
            lo: k - &self.hi,
            hi: k - &self.lo,
        }
    }

    /// Exact-midpoint approximation, handy for diagnostics.
    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &Enclosure {
    type Output = Enclosure;
    fn add(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub for &Enclosure {
    type Output = Enclosure;
    fn sub(self, rhs: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul for &Enclosure {
    type Output = Enclosure;
    fn mul(self, rhs: &Enclosure) -> Enclosure {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if *p < lo {
                lo = p.clone();
            }
            if *p > hi {
                hi = p.clone();
            }
        }
        Enclosure { lo, hi }
    }
}

impl Neg for &Enclosure {
    type Output = Enclosure;
    fn neg(self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Enclosure {
            type Output = Enclosure;
            fn $method(self, rhs: Enclosure) -> Enclosure {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

/// Smallest `k` with `2^-k <= eps`.
fn dyadic_exponent(eps: &Rational) -> u64 {
    // eps = p/q; want 2^k * p >= q
    let (p, q) = (eps.numer(), eps.denom());
    let mut k = q.bits().saturating_sub(p.bits());
    while (p << k) < *q {
        k += 1;
    }
    while k > 0 && (p << (k - 1)) >= *q {
        k -= 1;
    }
    k
}

/// Encloses `sqrt(q)` in an interval of width at most `eps`.
///
/// Perfect squares come back as exact points. Otherwise the bracket
/// `[isqrt(floor q), isqrt(floor q) + 1]` is bisected on the dyadic grid
/// `2^-k <= eps` until it is one grid step wide. Bisection runs on integer
/// numerators over the fixed denominator `2^k`; every step keeps
/// `lo^2 <= q <= hi^2` by exact comparison.
pub fn enclose_sqrt(q: &Rational, eps: &Rational) -> Result<Enclosure, RealError> {
    if q.is_negative() {
        return Err(RealError::NegativeRadicand(q.clone()));
    }
    if !eps.is_positive() {
        return Err(RealError::NonPositiveTolerance(eps.clone()));
    }
    if q.is_zero() {
        return Ok(Enclosure::point(Rational::zero()));
    }
    if let (Some(n), Some(d)) = (is_perfect_square(q.numer()), is_perfect_square(q.denom())) {
        return Ok(Enclosure::point(Rational::new(n, d)));
    }

    let k = dyadic_exponent(eps);
    let seed = q.floor().to_integer().sqrt();
    // (x / 2^k)^2 <= n / d  <=>  x^2 * d <= n * 4^k
    let target = q.numer() << (2 * k);
    let below = |x: &BigInt| x * x * q.denom() <= target;
    let mut lo = &seed << k;
    let mut hi = (seed + 1u32) << k;
    let one = BigInt::one();
    while &hi - &lo > one {
        let mid: BigInt = (&lo + &hi) >> 1;
        if below(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let denom = BigInt::one() << k;
    Ok(Enclosure {
        lo: Rational::new(lo, denom.clone()),
        hi: Rational::new(hi, denom),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Positive,
    Negative,
    Indeterminate,
}

/// Result of [`certified_sign`]: the sign plus the last enclosure evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certified {
    pub sign: Sign,
    pub enclosure: Enclosure,
    /// Tolerance handed to the evaluator on the deciding round.
    pub eps: Rational,
}

/// Decides the sign of a real given by a family of shrinking enclosures.
///
/// Starts at `eps = 2^-20` and halves until the enclosure excludes zero. Gives
/// up with [`Sign::Indeterminate`] once the enclosure is narrower than
/// `eps_floor` (or `eps` itself has fallen below it) while still straddling
/// zero.
pub fn certified_sign<F>(value_at: F, eps_floor: &Rational) -> Certified
where
    F: Fn(&Rational) -> Enclosure,
{
    let mut eps = pow2_inv(START_EPS_EXP);
    loop {
        let enclosure = value_at(&eps);
        let sign = if enclosure.lo.is_positive() {
            Some(Sign::Positive)
        } else if enclosure.hi.is_negative() {
            Some(Sign::Negative)
        } else if enclosure.width() < *eps_floor || eps < *eps_floor {
            Some(Sign::Indeterminate)
        } else {
            None
        };
        if let Some(sign) = sign {
            return Certified {
                sign,
                enclosure,
                eps,
            };
        }
        eps /= int(2);
    }
}
