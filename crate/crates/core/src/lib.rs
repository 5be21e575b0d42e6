//! Weighted Voronoi diagrams under convex distance functions, triple
//! equidistant points, and integer-distance point sets.

pub mod constructions;
pub mod enumerate;
pub mod error;
pub mod field;
pub mod io;
pub mod norm;
pub mod oracle;
pub mod point;
pub mod render;
pub mod surface;
pub mod triple;
pub mod verify;
pub mod voronoi;

pub use error::{Error, Result};
pub use field::{DistanceField, Metric};
pub use norm::{ArcBody, CircularArc, NormKind, NormSpec, StrictnessConfig};
pub use point::{Point, Rect};
pub use triple::{triple_points, SolverConfig, TriplePointSet};
pub use voronoi::{Diagram, SiteClass, WeightedSite};
