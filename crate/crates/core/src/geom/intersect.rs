use rayon::prelude::*;

use crate::curvegen::Polyline;
use crate::point::Point;

use super::{orient, point_segment_distance};

/// Uniform-grid spatial hash over a set of segments.
///
/// Each segment is registered in every bucket its bounding box touches. Built
/// once, then read-only.
#[derive(Debug, Clone)]
pub struct SegmentGrid {
    segments: Vec<(Point, Point)>,
    origin: Point,
    bucket: f64,
    cols: usize,
    rows: usize,
    /// CSR layout: bucket `b` holds `members[starts[b]..starts[b + 1]]`.
    starts: Vec<usize>,
    members: Vec<u32>,
}

impl SegmentGrid {
    /// `bucket` is the cell edge length. The grid is coarsened if it would need
    /// more than `4 · segments + 64` buckets.
    pub fn new(segments: Vec<(Point, Point)>, bucket: f64) -> Self {
        assert!(
            bucket > 0.0 && bucket.is_finite(),
            "bucket size must be positive"
        );
        assert!(segments.len() < u32::MAX as usize);
        let (mut lo, mut hi) = (
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for &(a, b) in &segments {
            for p in [a, b] {
                lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        if segments.is_empty() {
            lo = Point::ORIGIN;
            hi = Point::ORIGIN;
        }
        let max_buckets = (4 * segments.len() + 64) as f64;
        let mut bucket = bucket;
        let dims = |b: f64| {
            (
                ((hi.x - lo.x) / b).floor() + 1.0,
                ((hi.y - lo.y) / b).floor() + 1.0,
            )
        };
        while {
            let (c, r) = dims(bucket);
            c * r > max_buckets
        } {
            bucket *= 2.0;
        }
        let (c, r) = dims(bucket);
        let (cols, rows) = (c as usize, r as usize);

        let mut grid = SegmentGrid {
            segments,
            origin: lo,
            bucket,
            cols,
            rows,
            starts: vec![0; cols * rows + 1],
            members: Vec::new(),
        };
        // two passes: count, then fill
        let mut counts = vec![0usize; cols * rows];
        for s in 0..grid.segments.len() {
            grid.for_each_bucket_of(s, |b| counts[b] += 1);
        }
        let mut acc = 0;
        for (b, &c) in counts.iter().enumerate() {
            grid.starts[b] = acc;
            acc += c;
        }
        grid.starts[cols * rows] = acc;
        let mut fill = grid.starts.clone();
        let mut members = vec![0u32; acc];
        for s in 0..grid.segments.len() {
            grid.for_each_bucket_of(s, |b| {
                members[fill[b]] = s as u32;
                fill[b] += 1;
            });
        }
        grid.members = members;
        grid
    }

    pub fn segments(&self) -> &[(Point, Point)] {
        &self.segments
    }

    pub fn bucket_size(&self) -> f64 {
        self.bucket
    }

    fn cell_of(&self, p: Point) -> (isize, isize) {
        (
            ((p.x - self.origin.x) / self.bucket).floor() as isize,
            ((p.y - self.origin.y) / self.bucket).floor() as isize,
        )
    }

    fn clamp_col(&self, c: isize) -> usize {
        c.clamp(0, self.cols as isize - 1) as usize
    }

    fn clamp_row(&self, r: isize) -> usize {
        r.clamp(0, self.rows as isize - 1) as usize
    }

    fn for_each_bucket_of(&self, s: usize, mut f: impl FnMut(usize)) {
        let (a, b) = self.segments[s];
        let (c0, r0) = self.cell_of(Point::new(a.x.min(b.x), a.y.min(b.y)));
        let (c1, r1) = self.cell_of(Point::new(a.x.max(b.x), a.y.max(b.y)));
        for r in self.clamp_row(r0)..=self.clamp_row(r1) {
            for c in self.clamp_col(c0)..=self.clamp_col(c1) {
                f(r * self.cols + c);
            }
        }
    }

    fn bucket(&self, b: usize) -> &[u32] {
        &self.members[self.starts[b]..self.starts[b + 1]]
    }

    /// Whether some segment lies strictly closer than `radius` to `p`.
    ///
    /// Scans the block of buckets covering the disc around `p`; with
    /// `radius <= bucket_size` that is the 3×3 neighbourhood.
    pub fn within(&self, p: Point, radius: f64) -> bool {
        let (c0, r0) = self.cell_of(Point::new(p.x - radius, p.y - radius));
        let (c1, r1) = self.cell_of(Point::new(p.x + radius, p.y + radius));
        if c1 < 0 || r1 < 0 || c0 >= self.cols as isize || r0 >= self.rows as isize {
            return false;
        }
        for r in self.clamp_row(r0)..=self.clamp_row(r1) {
            for c in self.clamp_col(c0)..=self.clamp_col(c1) {
                for &s in self.bucket(r * self.cols + c) {
                    let (a, b) = self.segments[s as usize];
                    if point_segment_distance(p, a, b) < radius {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Indices `(i, j)`, `i < j`, of segments sharing at least one bucket.
    /// Each pair is reported once, in ascending order.
    pub fn candidate_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs: Vec<(u32, u32)> = (0..self.cols * self.rows)
            .into_par_iter()
            .flat_map_iter(|b| {
                let m = self.bucket(b);
                let mut out = Vec::new();
                for (x, &i) in m.iter().enumerate() {
                    for &j in &m[x + 1..] {
                        out.push((i.min(j), i.max(j)));
                    }
                }
                out
            })
            .collect();
        pairs.par_sort_unstable();
        pairs.dedup();
        pairs
    }
}

fn on_collinear_segment(a: Point, b: Point, p: Point) -> bool {
    a.x.min(b.x) <= p.x && p.x <= a.x.max(b.x) && a.y.min(b.y) <= p.y && p.y <= a.y.max(b.y)
}

/// Whether closed segments `[p1, p2]` and `[q1, q2]` share a point, with exact orientation tests.
pub fn segments_touch(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    let opposite = |a: f64, b: f64| (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0);
    if opposite(o1, o2) && opposite(o3, o4) {
        return true;
    }
    (o1 == 0.0 && on_collinear_segment(p1, p2, q1))
        || (o2 == 0.0 && on_collinear_segment(p1, p2, q2))
        || (o3 == 0.0 && on_collinear_segment(q1, q2, p1))
        || (o4 == 0.0 && on_collinear_segment(q1, q2, p2))
}

/// Adjacent segments `a→b`, `b→c` overlap beyond `b` iff they are collinear and fold back.
fn folds_back(a: Point, b: Point, c: Point) -> bool {
    if orient(a, b, c) != 0.0 {
        return false;
    }
    let same_side = |u: f64, v: f64, w: f64| (u < v && w < v) || (u > v && w > v);
    same_side(a.x, b.x, c.x) || same_side(a.y, b.y, c.y)
}

/// True iff two non-adjacent segments share a point, or two adjacent segments
/// overlap beyond their shared vertex.
pub fn self_intersects(p: &Polyline) -> bool {
    let v = p.vertices();
    if v.windows(3).any(|w| folds_back(w[0], w[1], w[2])) {
        return true;
    }
    let n = p.segment_count();
    if n < 3 {
        return false;
    }
    let segments: Vec<(Point, Point)> = p.segments().collect();
    let total: f64 = segments.iter().map(|(a, b)| a.dist(*b)).sum();
    let grid = SegmentGrid::new(segments, (total / n as f64).max(f64::MIN_POSITIVE));
    let segs = grid.segments();
    grid.candidate_pairs().into_par_iter().any(|(i, j)| {
        if j - i < 2 {
            return false;
        }
        let (a, b) = segs[i as usize];
        let (c, d) = segs[j as usize];
        segments_touch(a, b, c, d)
    })
}

/// Quadratic reference check used to cross-validate [`self_intersects`].
pub fn self_intersects_brute_force(p: &Polyline) -> bool {
    let v = p.vertices();
    if v.windows(3).any(|w| folds_back(w[0], w[1], w[2])) {
        return true;
    }
    let segs: Vec<(Point, Point)> = p.segments().collect();
    for i in 0..segs.len() {
        for j in i + 2..segs.len() {
            if segments_touch(segs[i].0, segs[i].1, segs[j].0, segs[j].1) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;
    use crate::curvegen::contract_iterate;
    use crate::model::parse_rule;
    use crate::rules;
    use proptest::prelude::*;

    fn poly(v: &[(f64, f64)]) -> Polyline {
        Polyline::new(v.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn unit_segment_is_simple() {
        assert!(!self_intersects(&Polyline::unit_segment()));
    }

    #[test]
    fn square_wave_crossing() {
        let p = poly(&[(0., 0.), (1., 0.), (1., 1.), (0., 1.), (0., 0.5), (2., 0.5)]);
        assert!(self_intersects_brute_force(&p));
        assert!(self_intersects(&p));
    }

    #[test]
    fn koch_depth_four_is_simple() {
        let koch = parse_rule(rules::KOCH).unwrap();
        let p = contract_iterate(&koch, 4, &Budget::default()).unwrap();
        assert!(!self_intersects_brute_force(&p));
        assert!(!self_intersects(&p));
    }

    #[test]
    fn collinear_fold_back_and_touching() {
        assert!(self_intersects(&poly(&[(0., 0.), (2., 0.), (1., 0.)])));
        assert!(!self_intersects(&poly(&[(0., 0.), (1., 0.), (2., 0.)])));
        // closed loop: first and last segment share (0,0)
        assert!(self_intersects(&poly(&[
            (0., 0.),
            (1., 0.),
            (1., 1.),
            (0., 0.)
        ])));
        // a vertex landing on a non-adjacent segment
        assert!(self_intersects(&poly(&[
            (0., 0.),
            (2., 0.),
            (2., 1.),
            (1., 0.)
        ])));
    }

    #[test]
    fn grid_within_matches_brute_force() {
        let koch = parse_rule(rules::KOCH).unwrap();
        let p = contract_iterate(&koch, 3, &Budget::default()).unwrap();
        let segs: Vec<_> = p.segments().collect();
        let grid = SegmentGrid::new(segs.clone(), 0.05);
        for i in 0..40 {
            for j in 0..20 {
                let q = Point::new(-0.1 + i as f64 * 0.031, -0.1 + j as f64 * 0.027);
                let brute = segs
                    .iter()
                    .any(|&(a, b)| point_segment_distance(q, a, b) < 0.05);
                assert_eq!(grid.within(q, 0.05), brute, "{q}");
            }
        }
    }

    proptest! {
        #[test]
        fn grid_agrees_with_quadratic_check(
            pts in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 3..40)
        ) {
            let mut v: Vec<Point> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
            v.dedup();
            prop_assume!(v.len() >= 2);
            let p = Polyline::new(v).unwrap();
            prop_assert_eq!(self_intersects(&p), self_intersects_brute_force(&p));
        }
    }
}
