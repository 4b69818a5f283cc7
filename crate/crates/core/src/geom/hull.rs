use crate::curvegen::Polyline;
use crate::error::{Error, Result};
use crate::point::Point;

use super::orient;

#[derive(Debug, Clone, PartialEq)]
pub struct HullSummary {
    /// Boundary length; twice the spanning length when all points are collinear.
    pub perimeter: f64,
    pub vertex_count: usize,
    pub area: f64,
}

/// Convex hull vertices in counter-clockwise order, starting from the
/// lexicographically smallest point. Collinear boundary points are dropped.
pub fn hull_points(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in &pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // the upper chain may not pop into the lower one
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 {
        // all collinear: keep the two extremes
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Hull of the polyline's vertex set.
///
/// Segment interiors never contribute extreme points, so the vertices suffice.
pub fn convex_hull(p: &Polyline) -> Result<HullSummary> {
    hull_of_points(p.vertices())
}

pub fn hull_of_points(points: &[Point]) -> Result<HullSummary> {
    let hull = hull_points(points);
    match hull.len() {
        0 => Err(Error::invalid("hull of an empty point set")),
        1 => Err(Error::invalid(
            "all points coincide; the hull is degenerate",
        )),
        2 => Ok(HullSummary {
            perimeter: 2.0 * hull[0].dist(hull[1]),
            vertex_count: 2,
            area: 0.0,
        }),
        n => {
            let mut perimeter = 0.0;
            let mut twice_area = 0.0;
            for i in 0..n {
                let a = hull[i];
                let b = hull[(i + 1) % n];
                perimeter += a.dist(b);
                twice_area += a.cross(b);
            }
            Ok(HullSummary {
                perimeter,
                vertex_count: n,
                area: 0.5 * twice_area,
            })
        }
    }
}

/// Largest distance between two vertices of the polyline.
pub fn diameter(p: &Polyline) -> f64 {
    let hull = hull_points(p.vertices());
    let mut best = 0.0f64;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max(hull[i].dist(hull[j]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn unit_square() {
        let sq = Polyline::new(pts(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.), (0., 0.)])).unwrap();
        let h = convex_hull(&sq).unwrap();
        assert_eq!(h.perimeter, 4.0);
        assert_eq!(h.area, 1.0);
        assert_eq!(h.vertex_count, 4);
    }

    #[test]
    fn collinear_points_give_twice_the_span() {
        let line = Polyline::new(pts(&[(0., 0.), (3., 4.), (1.5, 2.0)])).unwrap();
        let h = convex_hull(&line).unwrap();
        assert_eq!(h.perimeter, 10.0);
        assert_eq!(h.vertex_count, 2);
        assert_eq!(h.area, 0.0);
    }

    #[test]
    fn interior_and_boundary_collinear_points_are_ignored() {
        let base = pts(&[(0., 0.), (4., 0.), (4., 3.), (0., 3.)]);
        let mut more = base.clone();
        more.extend(pts(&[(2., 0.), (4., 1.5), (1., 1.), (2., 2.)]));
        assert_eq!(
            hull_of_points(&base).unwrap(),
            hull_of_points(&more).unwrap()
        );
        assert_eq!(hull_of_points(&more).unwrap().perimeter, 14.0);
    }

    #[test]
    fn identical_points_are_an_error() {
        assert!(hull_of_points(&pts(&[(1., 1.), (1., 1.)])).is_err());
    }

    #[test]
    fn hull_is_counter_clockwise_and_convex() {
        let cloud: Vec<Point> = (0..200)
            .map(|i| {
                let t = i as f64 * 0.618_033_988_75;
                Point::new((t * 7.1).sin() * (i as f64).sqrt(), (t * 3.3).cos() * 5.0)
            })
            .collect();
        let hull = hull_points(&cloud);
        let n = hull.len();
        for i in 0..n {
            assert!(orient(hull[i], hull[(i + 1) % n], hull[(i + 2) % n]) > 0.0);
        }
        for &p in &cloud {
            for i in 0..n {
                assert!(orient(hull[i], hull[(i + 1) % n], p) >= 0.0);
            }
        }
    }
}
