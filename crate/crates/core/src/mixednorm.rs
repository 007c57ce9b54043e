//! The space `E^a ⊕₁ E^b`: points, the mixed norm distance and equilateral-set
//! verification.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vector;

/// Relative tolerance used when none is given.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MixedNormError {
    #[error("point dimension mismatch: expected ({a}, {b}), got ({x}, {y})")]
    DimMismatch {
        a: usize,
        b: usize,
        x: usize,
        y: usize,
    },
    #[error("lambda must be positive and finite, got {0}")]
    BadLambda(f64),
    #[error("relative tolerance must be positive and finite, got {0}")]
    BadTolerance(f64),
    #[error("dimensions must be positive, got ({a}, {b})")]
    ZeroDimension { a: usize, b: usize },
    #[error("malformed point set: {0}")]
    Parse(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedPoint {
    pub x: Vector,
    pub y: Vector,
}

impl MixedPoint {
    pub fn new(x: Vector, y: Vector) -> Self {
        MixedPoint { x, y }
    }

    /// Exchanges the two factors, mapping `E^a ⊕₁ E^b` onto `E^b ⊕₁ E^a`.
    pub fn swapped(self) -> Self {
        MixedPoint {
            x: self.y,
            y: self.x,
        }
    }

    /// Every coordinate multiplied by `t`.
    pub fn scaled(&self, t: f64) -> Self {
        let scale = |v: &Vector| {
            Vector::new(v.coords().iter().map(|c| c * t).collect()).expect("finite scale")
        };
        MixedPoint {
            x: scale(&self.x),
            y: scale(&self.y),
        }
    }
}

/// `‖p.x − q.x‖₂ + ‖p.y − q.y‖₂`.
pub fn mixed_distance(p: &MixedPoint, q: &MixedPoint) -> Result<f64, MixedNormError> {
    if p.x.dim() != q.x.dim() || p.y.dim() != q.y.dim() {
        return Err(MixedNormError::DimMismatch {
            a: p.x.dim(),
            b: p.y.dim(),
            x: q.x.dim(),
            y: q.y.dim(),
        });
    }
    Ok(p.x.distance(&q.x) + p.y.distance(&q.y))
}

/// A candidate equilateral set in `E^a ⊕₁ E^b` with its target distance.
///
/// Field order here is the serialized field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub a: usize,
    pub b: usize,
    pub lambda: f64,
    pub swapped: bool,
    pub provenance: String,
    pub points: Vec<MixedPoint>,
}

impl PointSet {
    pub fn new(
        a: usize,
        b: usize,
        lambda: f64,
        provenance: impl Into<String>,
        points: Vec<MixedPoint>,
    ) -> Result<Self, MixedNormError> {
        let set = PointSet {
            a,
            b,
            lambda,
            swapped: false,
            provenance: provenance.into(),
            points,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<(), MixedNormError> {
        if self.a == 0 || self.b == 0 {
            return Err(MixedNormError::ZeroDimension {
                a: self.a,
                b: self.b,
            });
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(MixedNormError::BadLambda(self.lambda));
        }
        for p in &self.points {
            if p.x.dim() != self.a || p.y.dim() != self.b {
                return Err(MixedNormError::DimMismatch {
                    a: self.a,
                    b: self.b,
                    x: p.x.dim(),
                    y: p.y.dim(),
                });
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The same set viewed in `E^b ⊕₁ E^a`. Toggles the `swapped` flag.
    pub fn swap_factors(self) -> Self {
        PointSet {
            a: self.b,
            b: self.a,
            lambda: self.lambda,
            swapped: !self.swapped,
            provenance: self.provenance,
            points: self.points.into_iter().map(MixedPoint::swapped).collect(),
        }
    }

    /// Compact JSON, floats printed with 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        self.write_json(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    pub fn write_json<W: io::Write>(&self, writer: W) -> Result<(), MixedNormError> {
        let mut ser = serde_json::Serializer::with_formatter(writer, SignificantDigits);
        self.serialize(&mut ser)?;
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, MixedNormError> {
        let set: PointSet = serde_json::from_str(s)?;
        set.validate()?;
        Ok(set)
    }
}

/// JSON formatter that prints every float as `d.dddddddddddddddde±x`, which is
/// 17 significant digits and round-trips any binary64 exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignificantDigits;

impl serde_json::ser::Formatter for SignificantDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub n_points: usize,
    pub n_pairs: usize,
    pub lambda: f64,
    pub rel_tol: f64,
    pub max_abs_deviation: f64,
    /// `None` when there are no pairs.
    pub worst_pair: Option<(usize, usize)>,
    pub pass: bool,
}

/// Checks every pairwise mixed distance against `s.lambda`.
///
/// The worst pair is the first one, in lexicographic index order, attaining
/// the maximum deviation. NaN distances count as infinitely far off.
pub fn verify_equilateral(
    s: &PointSet,
    rel_tol: f64,
) -> Result<VerificationReport, MixedNormError> {
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(MixedNormError::BadTolerance(rel_tol));
    }
    s.validate()?;
    let n = s.points.len();
    let mut max_dev = 0.0f64;
    let mut worst = None;
    let mut n_pairs = 0;
    for i in 0..n {
        for j in i + 1..n {
            n_pairs += 1;
            let d = mixed_distance(&s.points[i], &s.points[j])?;
            let dev = (d - s.lambda).abs();
            let dev = if dev.is_nan() { f64::INFINITY } else { dev };
            if worst.is_none() || dev > max_dev {
                max_dev = dev;
                worst = Some((i, j));
            }
        }
    }
    Ok(VerificationReport {
        n_points: n,
        n_pairs,
        lambda: s.lambda,
        rel_tol,
        max_abs_deviation: max_dev,
        worst_pair: worst,
        pass: max_dev <= rel_tol * s.lambda,
    })
}
