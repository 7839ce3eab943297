//! Euclidean geometry: points, closed convex sets with exact metric
//! projections, distances, and intersections of affine sets.

mod affine;
mod point;
mod sets;

pub use affine::intersect_affine;
pub use point::Point;
pub use sets::{ConvexSet, SetSpec};
