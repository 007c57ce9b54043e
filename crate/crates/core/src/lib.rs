//! Explicit equilateral sets of size `a + b + 1` in `E^a ⊕₁ E^b`, the ℓ₁ sum
//! of two Euclidean spaces, together with certified checks of when the
//! block-simplex construction is realisable.

pub mod cli;
pub mod constructions;
pub mod feasibility;
pub mod geometry;
pub mod mixednorm;
pub mod realnum;
pub mod sweep;
