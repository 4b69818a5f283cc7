//! Geometry kernels: convex hull, Minkowski sausage area, self-intersection.

mod hull;
mod intersect;
mod sausage;

pub use hull::{convex_hull, diameter, hull_of_points, hull_points, HullSummary};
pub use intersect::{segments_touch, self_intersects, self_intersects_brute_force, SegmentGrid};
pub use sausage::{capsule_area, raster_area, sausage_area, SausageEstimate, MAX_TOLERANCE};

use crate::point::Point;

/// Exact sign of the orientation of `(a, b, c)`: positive when counter-clockwise,
/// zero when collinear.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    robust::orient2d(a.coord(), b.coord(), c.coord())
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}
