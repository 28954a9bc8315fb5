//! Weil–Petersson Hessian of geodesic length on model hyperbolic surfaces.
//! Charts and quadratic differentials live in `geom` and `qdiff`; the two
//! halves of the Hessian are computed in `jacobi1d` and `elliptic`.

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod fit;
pub mod geom;
pub mod hessian;
pub mod jacobi1d;
pub mod qdiff;
pub mod quad;
pub mod random;
pub mod selftest;
pub mod thurston;

pub use error::{Result, WphError};
pub use geom::{CylinderChart, GeodesicCurve, ModelSurface};
pub use qdiff::{FieldOnGeodesic, QuadDiff};
