//! Dimension-generic geometry: points, spheres, star-like surfaces,
//! exact nearest-neighbour indexing and Hausdorff distances.

mod hausdorff;
mod kdtree;
mod point;
pub mod sampling;
mod star;

pub use hausdorff::{directed_hausdorff, hausdorff_distance};
pub use kdtree::SpatialIndex;
pub(crate) use point::{dist as point_dist, norm as point_norm};
pub use point::{PointN, Sphere};
pub use star::{radial_star_inverse, radial_star_map, Polytope, StarSurface, SurfaceKind};
