//! Explicit unit-distance equilateral sets in `E^a ⊕₁ E^b`.
//!
//! Each family is a [`Construction`] registered by name in a
//! [`ConstructionRegistry`]. The registry's `auto` path classifies the pair,
//! picks the construction that handles the verdict and, when the caller's
//! dimensions were given as `a > b`, builds the mirrored pair and swaps the two
//! factors of every point.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::feasibility::{
    classify, derive_parameters, f_value, g_value, FeasibilityError, FeasibilityVerdict,
    Parameters, Precision, VerdictKind,
};
use crate::geometry::{
    circumradius, ApexStacking, BlockLayout, GeometryError, SimplexBuilder, Vector,
};
use crate::mixednorm::{MixedNormError, MixedPoint, PointSet};

/// Largest negative rounding residue tolerated in an offset radicand before
/// it is treated as a real failure.
const OFFSET_SLACK: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("no block construction for ({a}, {b}): verdict {}", verdict.kind)]
    Infeasible {
        a: u64,
        b: u64,
        verdict: Box<FeasibilityVerdict>,
    },
    #[error("construction `{name}` does not apply to ({a}, {b})")]
    NotApplicable { name: &'static str, a: u64, b: u64 },
    #[error("unknown construction `{0}`")]
    Unknown(String),
    #[error("offset radicand {0} is negative")]
    NegativeOffset(f64),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    MixedNorm(#[from] MixedNormError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructionResult {
    pub point_set: PointSet,
    /// Offset along the extra `E^1` axis: the apex height for the
    /// cross-polytope set, `ζ` for the block construction.
    pub zeta: Option<f64>,
    pub parameters: Option<Parameters>,
}

impl ConstructionResult {
    pub fn len(&self) -> usize {
        self.point_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_set.is_empty()
    }

    fn swapped(self) -> Self {
        ConstructionResult {
            point_set: self.point_set.swap_factors(),
            ..self
        }
    }
}

/// One family of equilateral-set constructions.
///
/// `build` is only ever called with `a <= b`; the registry takes care of
/// mirrored inputs.
pub trait Construction: Send + Sync {
    fn name(&self) -> &'static str;

    /// Whether this construction is the one that realises `kind`.
    fn handles(&self, kind: VerdictKind) -> bool;

    fn build(
        &self,
        a: u64,
        b: u64,
        simplex: &dyn SimplexBuilder,
        precision: Precision,
    ) -> Result<ConstructionResult, ConstructionError>;
}

fn dim(n: u64) -> usize {
    usize::try_from(n).expect("dimension fits in usize")
}

fn scalar(x: f64) -> Vector {
    Vector::new(vec![x]).expect("finite offset")
}

fn offset(radicand: f64) -> Result<f64, ConstructionError> {
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand > -OFFSET_SLACK {
        Ok(0.0)
    } else {
        Err(ConstructionError::NegativeOffset(radicand))
    }
}

fn d_sq(n: u64) -> f64 {
    let d = circumradius(n);
    d * d
}

/// `E^1 ⊕₁ E^b`: a unit `b`-simplex in `E^b` at `x = 0`, plus the point
/// `(1 − d_b, o)`.
#[derive(Debug, Default, Clone, Copy)]
pub struct LineAndSimplex;

impl Construction for LineAndSimplex {
    fn name(&self) -> &'static str {
        "prop1"
    }

    fn handles(&self, kind: VerdictKind) -> bool {
        kind == VerdictKind::Prop1
    }

    fn build(
        &self,
        a: u64,
        b: u64,
        simplex: &dyn SimplexBuilder,
        _precision: Precision,
    ) -> Result<ConstructionResult, ConstructionError> {
        if a != 1 || b == 0 {
            return Err(ConstructionError::NotApplicable {
                name: self.name(),
                a,
                b,
            });
        }
        let bd = dim(b);
        let origin = Vector::zeros(1);
        let mut points: Vec<MixedPoint> = simplex
            .build(bd + 1, 1.0, bd)?
            .into_iter()
            .map(|y| MixedPoint::new(origin.clone(), y))
            .collect();
        points.push(MixedPoint::new(
            scalar(1.0 - circumradius(b)),
            Vector::zeros(bd),
        ));
        Ok(ConstructionResult {
            point_set: PointSet::new(1, bd, 1.0, format!("prop1(b={b})"), points)?,
            zeta: None,
            parameters: None,
        })
    }
}

/// `E^a ⊕₁ E^a`: the `2a` points `(v_i, ±e_i/2)` over a regular simplex of
/// side `1 − 1/√2` in the first `a − 1` coordinates, plus an apex on the last
/// axis at distance 1/2 from every `v_i`.
#[derive(Debug, Default, Clone, Copy)]
pub struct CrossPolytopeApex;

impl CrossPolytopeApex {
    pub fn side() -> f64 {
        1.0 - std::f64::consts::FRAC_1_SQRT_2
    }

    /// Squared apex height `1/4 − ((1 − 1/√2)·d_{a−1})²`.
    pub fn apex_radicand(a: u64) -> f64 {
        let r = Self::side() * circumradius(a - 1);
        0.25 - r * r
    }
}

impl Construction for CrossPolytopeApex {
    fn name(&self) -> &'static str {
        "prop2"
    }

    fn handles(&self, kind: VerdictKind) -> bool {
        kind == VerdictKind::Prop2
    }

    fn build(
        &self,
        a: u64,
        b: u64,
        simplex: &dyn SimplexBuilder,
        _precision: Precision,
    ) -> Result<ConstructionResult, ConstructionError> {
        if a != b || a < 2 {
            return Err(ConstructionError::NotApplicable {
                name: self.name(),
                a,
                b,
            });
        }
        let ad = dim(a);
        let base = simplex.build(ad, Self::side(), ad)?;
        let half_axis = |i: usize, sign: f64| {
            let mut e = Vector::zeros(ad);
            e.coords_mut()[i] = 0.5 * sign;
            e
        };
        let mut points = Vec::with_capacity(2 * ad + 1);
        for sign in [1.0, -1.0] {
            for (i, v) in base.iter().enumerate() {
                points.push(MixedPoint::new(v.clone(), half_axis(i, sign)));
            }
        }
        let t = offset(Self::apex_radicand(a))?;
        let mut apex = Vector::zeros(ad);
        apex.coords_mut()[ad - 1] = t;
        points.push(MixedPoint::new(apex, Vector::zeros(ad)));
        Ok(ConstructionResult {
            point_set: PointSet::new(ad, ad, 1.0, format!("prop2(a={a})"), points)?,
            zeta: Some(t),
            parameters: None,
        })
    }
}

/// `b > a >= 2`: `E^b` split into `α` blocks of dimension `c − 1` and `β`
/// blocks of dimension `c`, each carrying a unit simplex; the block centres
/// `w_i`, `z_j` in `E^a` form two regular simplices of sides `f(c−1)` and
/// `f(c)` at mutual distance `g(c)`.
#[derive(Debug, Default, Clone, Copy)]
pub struct BlockSimplices;

/// The `E^a` coordinates of the block centres.
struct Centres {
    w: Vec<Vector>,
    z: Vec<Vector>,
    zeta: Option<f64>,
}

impl BlockSimplices {
    fn centres(p: &Parameters, simplex: &dyn SimplexBuilder) -> Result<Centres, ConstructionError> {
        let (a, alpha, beta) = (dim(p.a), dim(p.alpha), dim(p.beta));
        let fw = f_value(p.c - 1);
        let fz = f_value(p.c);
        let g = g_value(p.c);
        let centres = match p.beta {
            0 => Centres {
                w: simplex.build(a + 1, fw, a)?,
                z: Vec::new(),
                zeta: None,
            },
            1 => {
                let layout = BlockLayout::new(vec![a - 1, 1])?;
                let zeta = offset(g * g - d_sq(p.a - 1) * fw * fw)?;
                let w = simplex
                    .build(a, fw, a - 1)?
                    .iter()
                    .map(|v| layout.place(v, 0))
                    .collect::<Result<_, _>>()?;
                let z = vec![layout.place(&scalar(zeta), 1)?];
                Centres {
                    w,
                    z,
                    zeta: Some(zeta),
                }
            }
            beta if beta == p.a => {
                let layout = BlockLayout::new(vec![a - 1, 1])?;
                let zeta = offset(g * g - d_sq(p.a - 1) * fz * fz)?;
                let z = simplex
                    .build(a, fz, a - 1)?
                    .iter()
                    .map(|v| layout.place(v, 0))
                    .collect::<Result<_, _>>()?;
                let w = vec![layout.place(&scalar(zeta), 1)?];
                Centres {
                    w,
                    z,
                    zeta: Some(zeta),
                }
            }
            _ => {
                let layout = BlockLayout::new(vec![alpha - 1, beta - 1, 1])?;
                let zeta =
                    offset(g * g - d_sq(p.alpha - 1) * fw * fw - d_sq(p.beta - 1) * fz * fz)?;
                let w = simplex
                    .build(alpha, fw, alpha - 1)?
                    .iter()
                    .map(|v| layout.place(v, 0))
                    .collect::<Result<_, _>>()?;
                let lift = scalar(zeta);
                let no_w = Vector::zeros(alpha - 1);
                let z = simplex
                    .build(beta, fz, beta - 1)?
                    .iter()
                    .map(|q| layout.assemble(&[&no_w, q, &lift]))
                    .collect::<Result<_, _>>()?;
                Centres {
                    w,
                    z,
                    zeta: Some(zeta),
                }
            }
        };
        Ok(centres)
    }
}

impl Construction for BlockSimplices {
    fn name(&self) -> &'static str {
        "theorem"
    }

    fn handles(&self, kind: VerdictKind) -> bool {
        matches!(
            kind,
            VerdictKind::BetaTrivial(_) | VerdictKind::InequalityHolds
        )
    }

    fn build(
        &self,
        a: u64,
        b: u64,
        simplex: &dyn SimplexBuilder,
        precision: Precision,
    ) -> Result<ConstructionResult, ConstructionError> {
        let p = derive_parameters(a, b).map_err(|_| ConstructionError::NotApplicable {
            name: self.name(),
            a,
            b,
        })?;
        let verdict = classify(a, b, precision)?;
        if !self.handles(verdict.kind) {
            return Err(ConstructionError::Infeasible {
                a,
                b,
                verdict: Box::new(verdict),
            });
        }

        let Centres { w, z, zeta } = Self::centres(&p, simplex)?;
        debug_assert_eq!((w.len(), z.len()), (dim(p.alpha), dim(p.beta)));

        let c = dim(p.c);
        let mut block_dims = vec![c - 1; dim(p.alpha)];
        block_dims.extend(std::iter::repeat_n(c, dim(p.beta)));
        let layout = BlockLayout::new(block_dims)?;
        let small = simplex.build(c, 1.0, c - 1)?;
        let large = simplex.build(c + 1, 1.0, c)?;

        let mut points = Vec::with_capacity(dim(a + b + 1));
        for (i, wi) in w.iter().enumerate() {
            for u in &small {
                points.push(MixedPoint::new(wi.clone(), layout.place(u, i)?));
            }
        }
        for (j, zj) in z.iter().enumerate() {
            for v in &large {
                points.push(MixedPoint::new(zj.clone(), layout.place(v, w.len() + j)?));
            }
        }
        let provenance = format!(
            "theorem(a={a},b={b},c={},alpha={},beta={})",
            p.c, p.alpha, p.beta
        );
        Ok(ConstructionResult {
            point_set: PointSet::new(dim(a), dim(b), 1.0, provenance, points)?,
            zeta,
            parameters: Some(p),
        })
    }
}

/// Name-keyed set of constructions sharing one simplex kernel and one
/// certification precision.
#[derive(Clone)]
pub struct ConstructionRegistry {
    entries: Vec<Arc<dyn Construction>>,
    simplex: Arc<dyn SimplexBuilder>,
    precision: Precision,
}

impl fmt::Debug for ConstructionRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConstructionRegistry")
            .field("entries", &self.names())
            .field("simplex", &self.simplex.name())
            .field("precision", &self.precision)
            .finish()
    }
}

impl Default for ConstructionRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl ConstructionRegistry {
    pub fn empty() -> Self {
        ConstructionRegistry {
            entries: Vec::new(),
            simplex: Arc::new(ApexStacking),
            precision: Precision::default(),
        }
    }

    /// `prop1`, `prop2` and `theorem`, apex-stacking simplices, default precision.
    pub fn with_defaults() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(LineAndSimplex));
        reg.register(Arc::new(CrossPolytopeApex));
        reg.register(Arc::new(BlockSimplices));
        reg
    }

    pub fn with_simplex(mut self, simplex: Arc<dyn SimplexBuilder>) -> Self {
        self.simplex = simplex;
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    /// Adds a construction, replacing and returning any previous entry with
    /// the same name.
    pub fn register(&mut self, c: Arc<dyn Construction>) -> Option<Arc<dyn Construction>> {
        if let Some(slot) = self.entries.iter_mut().find(|e| e.name() == c.name()) {
            return Some(std::mem::replace(slot, c));
        }
        self.entries.push(c);
        None
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&Arc<dyn Construction>> {
        self.entries.iter().find(|e| e.name() == name)
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Classifies `(a, b)` and runs the construction that handles the verdict.
    pub fn construct(&self, a: u64, b: u64) -> Result<ConstructionResult, ConstructionError> {
        let verdict = classify(a, b, self.precision)?;
        if !verdict.kind.is_constructible() {
            return Err(ConstructionError::Infeasible {
                a,
                b,
                verdict: Box::new(verdict),
            });
        }
        let entry = self
            .entries
            .iter()
            .find(|e| e.handles(verdict.kind))
            .ok_or_else(|| ConstructionError::Unknown(verdict.kind.to_string()))?;
        self.run(entry.as_ref(), a, b)
    }

    /// Runs a specific construction by name.
    pub fn construct_with(
        &self,
        name: &str,
        a: u64,
        b: u64,
    ) -> Result<ConstructionResult, ConstructionError> {
        let entry = self
            .get(name)
            .ok_or_else(|| ConstructionError::Unknown(name.to_string()))?;
        self.run(entry.as_ref(), a, b)
    }

    fn run(
        &self,
        entry: &dyn Construction,
        a: u64,
        b: u64,
    ) -> Result<ConstructionResult, ConstructionError> {
        if a > b {
            let mirrored = self.run(entry, b, a).map_err(|e| match e {
                ConstructionError::Infeasible { verdict, .. } => ConstructionError::Infeasible {
                    a,
                    b,
                    verdict: Box::new(FeasibilityVerdict {
                        swapped: true,
                        ..*verdict
                    }),
                },
                ConstructionError::NotApplicable { name, .. } => {
                    ConstructionError::NotApplicable { name, a, b }
                }
                other => other,
            })?;
            return Ok(mirrored.swapped());
        }
        entry.build(a, b, self.simplex.as_ref(), self.precision)
    }
}

pub fn construct_prop1(b: u64) -> Result<ConstructionResult, ConstructionError> {
    ConstructionRegistry::with_defaults().construct_with("prop1", 1, b)
}

pub fn construct_prop2(a: u64) -> Result<ConstructionResult, ConstructionError> {
    ConstructionRegistry::with_defaults().construct_with("prop2", a, a)
}

pub fn construct_theorem(a: u64, b: u64) -> Result<ConstructionResult, ConstructionError> {
    ConstructionRegistry::with_defaults().construct_with("theorem", a, b)
}

/// Equilateral set of size `a + b + 1` (or `b + 2` when `a = 1`) with unit
/// distances, via whichever construction applies.
pub fn construct(a: u64, b: u64) -> Result<ConstructionResult, ConstructionError> {
    ConstructionRegistry::with_defaults().construct(a, b)
}
