//! Deterministic distributed list coloring.
//!
//! Algorithms run as per-node programs on a synchronous round simulator
//! ([`engine`]) in the LOCAL or CONGEST model. Real-valued parameters are
//! generic over [`Scalar`], so the same code runs in `f64`, `f32` or exact
//! rational arithmetic.

pub mod bni;
pub mod coloring;
pub mod degplus1;
pub mod engine;
pub mod error;
pub mod graph;
pub mod hpartition;
pub mod listreduce;
pub mod oracle;
pub mod primitives;
pub mod scalar;

pub use coloring::{
    Color, ColorSpace, ColorSpacePartition, ListAssignment, PartialColoring, ProperColoring,
};
pub use engine::{Executor, Mode, RunMetrics};
pub use error::{Error, Result};
pub use graph::{Graph, GraphKind, NodeId, Orientation};
pub use scalar::Scalar;

/// Floating-point parameters.
pub type Real = f64;
/// Exact rational parameters.
pub type Exact = num_rational::Ratio<i64>;

pub type DefectiveColoring = coloring::DefectiveColoring<Real>;
