//! Exact rational polyhedral kernel.

mod hull;
pub mod io;
pub mod linalg;
mod polytope;
mod vector;
mod volume;

pub use linalg::Matrix;
pub use polytope::{apply_linear, convex_hull, gauge_norm, polar_dual, shadow_area, HalfSpace, Polytope};
pub use vector::RationalVector;
pub use volume::{f_vector, triangulation, volume};
