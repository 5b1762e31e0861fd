//! Tree-cut width of multigraphs: decompositions and their width, a
//! 2-approximation, an exact solver for small graphs, and generators for the
//! standard lower-bound and hardness constructions.

pub mod approx;
pub mod decomposition;
pub mod error;
pub mod exact;
pub mod format;
pub mod instances;
pub mod multigraph;
pub mod reduce;
pub mod starcut;
pub mod treewidth;

pub use approx::{approx_tcw, ApproxOutcome, Certificate};
pub use exact::{exact_tcw, OracleResult};
pub use decomposition::{TreeCutDecomposition, WidthReport};
pub use error::{Error, Result};

pub use multigraph::{Multigraph, Vertex, VertexSet};
