//! Heat kernels on weighted graphs through Dirichlet exhaustions, intrinsic
//! metrics, anti-trees, and anchored Gaussian upper bounds.

pub mod antitree;
pub mod band;
pub mod bounds;
pub mod error;
pub mod functionals;
pub mod graph;
pub mod heat;
pub mod metric;
pub mod suite;

pub use error::{Error, Result};
pub use graph::{VertexId, VertexSet, WeightedGraph};
pub use metric::VertexMetric;
