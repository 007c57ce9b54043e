//! Euclidean building blocks: vectors, orthogonal block layouts and regular
//! simplices in binary64.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::realnum::{int, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("a {vertices}-vertex simplex needs ambient dimension >= {needed}, got {ambient}")]
    AmbientTooSmall {
        vertices: usize,
        needed: usize,
        ambient: usize,
    },
    #[error("simplex must have at least one vertex")]
    NoVertices,
    #[error("side length must be positive and finite, got {0}")]
    BadSide(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("block index {index} out of range for {blocks} blocks")]
    NoSuchBlock { index: usize, blocks: usize },
    #[error("block dimensions must be positive")]
    EmptyBlock,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("unknown simplex builder `{0}`")]
    UnknownBuilder(String),
}

/// Point or displacement in `R^dim`. Zero-dimensional vectors are allowed; they
/// stand for the origin of the trivial space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl TryFrom<Vec<f64>> for Vector {
    type Error = GeometryError;

    fn try_from(coords: Vec<f64>) -> Result<Self, GeometryError> {
        Vector::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Vector(coords))
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Euclidean distance. Panics on mismatched dimensions.
    pub fn distance(&self, other: &Vector) -> f64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "distance between different dimensions"
        );
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Concatenation, i.e. the vector of `self ⊕ other`.
    pub fn concat(&self, other: &Vector) -> Vector {
        let mut coords = self.0.clone();
        coords.extend_from_slice(&other.0);
        Vector(coords)
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Splitting of `R^total` into consecutive pairwise-orthogonal coordinate
/// blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
    total_dim: usize,
}

impl BlockLayout {
    pub fn new(block_dims: Vec<usize>) -> Result<Self, GeometryError> {
        if block_dims.contains(&0) {
            return Err(GeometryError::EmptyBlock);
        }
        let mut offsets = Vec::with_capacity(block_dims.len());
        let mut total_dim = 0;
        for &d in &block_dims {
            offsets.push(total_dim);
            total_dim += d;
        }
        Ok(BlockLayout {
            block_dims,
            offsets,
            total_dim,
        })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn len(&self) -> usize {
        self.block_dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.block_dims.is_empty()
    }

    /// Embeds `v` into block `block_index`, zero elsewhere.
    pub fn place(&self, v: &Vector, block_index: usize) -> Result<Vector, GeometryError> {
        let &dim = self
            .block_dims
            .get(block_index)
            .ok_or(GeometryError::NoSuchBlock {
                index: block_index,
                blocks: self.block_dims.len(),
            })?;
        if v.dim() != dim {
            return Err(GeometryError::DimMismatch {
                expected: dim,
                got: v.dim(),
            });
        }
        let mut out = Vector::zeros(self.total_dim);
        let start = self.offsets[block_index];
        out.0[start..start + dim].copy_from_slice(v.coords());
        Ok(out)
    }

    /// Concatenates one vector per block into a vector of `R^total`.
    pub fn assemble(&self, parts: &[&Vector]) -> Result<Vector, GeometryError> {
        if parts.len() != self.block_dims.len() {
            return Err(GeometryError::DimMismatch {
                expected: self.block_dims.len(),
                got: parts.len(),
            });
        }
        let mut coords = Vec::with_capacity(self.total_dim);
        for (part, &dim) in parts.iter().zip(&self.block_dims) {
            if part.dim() != dim {
                return Err(GeometryError::DimMismatch {
                    expected: dim,
                    got: part.dim(),
                });
            }
            coords.extend_from_slice(part.coords());
        }
        Ok(Vector(coords))
    }
}

pub fn place_in_block(
    v: &Vector,
    layout: &BlockLayout,
    block_index: usize,
) -> Result<Vector, GeometryError> {
    layout.place(v, block_index)
}

/// Squared circumradius of the unit regular `n`-simplex, `n / (2n + 2)`.
/// The 0-simplex (a single point) has circumradius 0.
pub fn circumradius_sq(n: u64) -> Rational {
    if n == 0 {
        return int(0);
    }
    let n = i64::try_from(n).expect("simplex dimension fits in i64");
    rat(n, 2 * n + 2)
}

/// `d_n` in binary64.
pub fn circumradius(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    (n / (2.0 * n + 2.0)).sqrt()
}

/// A way of producing the vertices of a regular simplex centred on the origin.
///
/// Implementations must return `m` vectors of dimension `ambient_dim` that use
/// only the first `m - 1` coordinates, with every pairwise distance `side`.
pub trait SimplexBuilder: Send + Sync {
    fn name(&self) -> &'static str;

    fn build(&self, m: usize, side: f64, ambient_dim: usize) -> Result<Vec<Vector>, GeometryError>;
}

fn check_simplex_args(m: usize, side: f64, ambient_dim: usize) -> Result<(), GeometryError> {
    if m == 0 {
        return Err(GeometryError::NoVertices);
    }
    if !(side.is_finite() && side > 0.0) {
        return Err(GeometryError::BadSide(side.to_string()));
    }
    if ambient_dim + 1 < m {
        return Err(GeometryError::AmbientTooSmall {
            vertices: m,
            needed: m - 1,
            ambient: ambient_dim,
        });
    }
    Ok(())
}

/// Stacks each new vertex above the centroid of the previous ones, then
/// recentres. Closed form per axis `j`: vertices `0..=j` sit at `-h/(j+2)`,
/// vertex `j+1` at `h(j+1)/(j+2)`, later ones at 0, where `h` is the height
/// of the `(j+1)`-simplex over its base.
#[derive(Debug, Default, Clone, Copy)]
pub struct ApexStacking;

impl SimplexBuilder for ApexStacking {
    fn name(&self) -> &'static str {
        "apex"
    }

    fn build(&self, m: usize, side: f64, ambient_dim: usize) -> Result<Vec<Vector>, GeometryError> {
        check_simplex_args(m, side, ambient_dim)?;
        let mut verts = vec![Vector::zeros(ambient_dim); m];
        for j in 0..m - 1 {
            let k = (j + 1) as f64;
            let h = side * ((k + 1.0) / (2.0 * k)).sqrt();
            let base = -h / (k + 1.0);
            for v in verts.iter_mut().take(j + 1) {
                v.0[j] = base;
            }
            verts[j + 1].0[j] = h * k / (k + 1.0);
        }
        Ok(verts)
    }
}

/// Takes the standard basis `e_0..e_{m-1}` of `R^m`, subtracts its centroid
/// and expresses the result in the Helmert orthonormal basis of the
/// sum-zero hyperplane, scaled from side `sqrt 2` to `side`.
#[derive(Debug, Default, Clone, Copy)]
pub struct BasisProjection;

impl SimplexBuilder for BasisProjection {
    fn name(&self) -> &'static str {
        "projection"
    }

    fn build(&self, m: usize, side: f64, ambient_dim: usize) -> Result<Vec<Vector>, GeometryError> {
        check_simplex_args(m, side, ambient_dim)?;
        let centroid = 1.0 / m as f64;
        let scale = side / std::f64::consts::SQRT_2;
        let helmert: Vec<Vec<f64>> = (0..m - 1)
            .map(|j| {
                let k = (j + 1) as f64;
                let norm = (k * (k + 1.0)).sqrt();
                let mut b = vec![0.0; m];
                b[..=j].fill(1.0 / norm);
                b[j + 1] = -k / norm;
                b
            })
            .collect();
        let verts = (0..m)
            .map(|i| {
                let mut shifted = vec![-centroid; m];
                shifted[i] += 1.0;
                let mut out = vec![0.0; ambient_dim];
                for (j, b) in helmert.iter().enumerate() {
                    out[j] = scale * shifted.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                }
                Vector(out)
            })
            .collect();
        Ok(verts)
    }
}

/// Names of the built-in simplex builders, default first.
pub const SIMPLEX_BUILDERS: &[&str] = &["apex", "projection"];

pub fn simplex_builder(name: &str) -> Result<Box<dyn SimplexBuilder>, GeometryError> {
    match name {
        "apex" => Ok(Box::new(ApexStacking)),
        "projection" => Ok(Box::new(BasisProjection)),
        other => Err(GeometryError::UnknownBuilder(other.to_string())),
    }
}

/// Vertices of a regular `(m-1)`-simplex with the given side, centred on the
/// origin of `R^ambient_dim`, using the default builder.
pub fn regular_simplex(
    m: usize,
    side: f64,
    ambient_dim: usize,
) -> Result<Vec<Vector>, GeometryError> {
    ApexStacking.build(m, side, ambient_dim)
}
