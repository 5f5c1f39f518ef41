//! Exact-arithmetic invariants of knot and link diagrams colored by linear
//! Alexander quandles `a*b = ma + (1-m)b (mod n)`: Alexander polynomials and
//! m-determinants, (p,m)-coloring enumeration and counting, palette graphs
//! and their determinant lemmas, lower bounds on the minimum number of
//! colors, affine orbit classification, and Reidemeister-move color
//! reduction.
//!
//! The numeric core is generic over the scalar ring (`linalg::Matrix<R>`);
//! the concrete instantiations used throughout are exported at the crate
//! root as [`IntMatrix`] (arbitrary-precision integers) and [`PolyMatrix`]
//! (integer Laurent polynomials in `T`).

pub mod alexander;
pub mod auto;
pub mod bounds;
pub mod coloring;
pub mod diagram;
pub mod knotdb;
pub mod laurent;
pub mod linalg;
pub mod moves;
pub mod palette;

pub use alexander::{AlexanderError, AlexanderResult};
pub use auto::{AffineMap, AutoError, OrbitClass};
pub use bounds::{BoundReport, BoundsError};
pub use coloring::{Coloring, ColoringCensus, ColoringError, ColoringParams};
pub use diagram::{ArcId, Crossing, CrossingId, DiagramError, EdgeId, KnotDiagram};
pub use knotdb::{KnotDbError, KnotRecord};
pub use laurent::LaurentPoly;
pub use linalg::{IntMatrix, LinalgError, Matrix, PolyMatrix};
pub use moves::{
    MinimizeOutcome, MoveError, MoveKind, MoveOutcome, MoveSite, SearchBudget,
};
pub use palette::{PaletteError, PaletteGraph, SpanningForest};

/// Arbitrary-precision signed integer scalar.
pub type BigInt = num_bigint::BigInt;
