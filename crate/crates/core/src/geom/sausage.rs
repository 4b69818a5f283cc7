//! Rasterized area of the ε-Minkowski sausage `{P : dist(P, p) < ε/2}` of a polyline.
//!
//! A cell of the grid laid over the bounding box (inflated by ε/2) is counted
//! when its centre lies inside the sausage. The count is taken row by row: a
//! horizontal line meets each segment's capsule in one open interval, which
//! maps to a run of cell columns; the union of those runs over the segments
//! active in the row is the row's count. Rows are swept with an active-segment
//! list, so the cost is proportional to the covered rows of each capsule
//! rather than to the bounding box.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::budget::Budget;
use crate::curvegen::Polyline;
use crate::error::{Error, Result};
use crate::point::Point;

/// Initial raster cell, as a fraction of ε.
const INITIAL_CELLS_PER_EPSILON: f64 = 8.0;
const MAX_REFINEMENTS: u32 = 24;
pub const MAX_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SausageEstimate {
    pub area: f64,
    /// Sausage width; points closer than `epsilon / 2` to the curve are inside.
    pub epsilon: f64,
    /// Edge length of the finest raster cell used.
    pub cell: f64,
    /// Relative area change between the last two refinements.
    pub refinement_delta: f64,
    /// Cells counted at the finest level.
    pub cells_inside: u64,
}

/// Area of the ε/2-neighbourhood of a single segment of length `length`:
/// a `length × ε` rectangle plus a disc of diameter ε.
pub fn capsule_area(length: f64, epsilon: f64) -> f64 {
    length * epsilon + PI * (0.5 * epsilon) * (0.5 * epsilon)
}

/// Open interval of x where the line `y = c` meets the capsule of radius `r`
/// around segment `p→q`.
fn capsule_span(p: Point, q: Point, r: f64, c: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for e in [p, q] {
        let dy = c - e.y;
        if dy.abs() < r {
            let w = (r * r - dy * dy).sqrt();
            lo = lo.min(e.x - w);
            hi = hi.max(e.x + w);
        }
    }
    // body: s = x - p.x with |s·d.y - u·d.x| < r·L and 0 <= s·d.x + u·d.y <= L²
    let d = q - p;
    let len2 = d.dot(d);
    let len = len2.sqrt();
    let u = c - p.y;
    let (mut s_lo, mut s_hi) = (f64::NEG_INFINITY, f64::INFINITY);
    if d.y != 0.0 {
        let a = (u * d.x - r * len) / d.y;
        let b = (u * d.x + r * len) / d.y;
        s_lo = s_lo.max(a.min(b));
        s_hi = s_hi.min(a.max(b));
    } else if u.abs() >= r {
        s_hi = f64::NEG_INFINITY;
    }
    if d.x != 0.0 {
        let a = -u * d.y / d.x;
        let b = (len2 - u * d.y) / d.x;
        s_lo = s_lo.max(a.min(b));
        s_hi = s_hi.min(a.max(b));
    } else {
        let t = u * d.y;
        if !(0.0..=len2).contains(&t) {
            s_hi = f64::NEG_INFINITY;
        }
    }
    if s_lo < s_hi {
        lo = lo.min(p.x + s_lo);
        hi = hi.max(p.x + s_hi);
    }
    (lo < hi).then_some((lo, hi))
}

/// Grid offsets, in cells, that keep the lattice out of phase with axis-aligned
/// and rationally placed geometry.
const OFFSET_X: f64 = 0.381_966_011_250_105_1;
const OFFSET_Y: f64 = 0.414_213_562_373_095_1;

/// Lower-left corner of the grid over `bounds` inflated by `radius`.
fn grid_origin(bounds: (Point, Point), radius: f64, cell: f64) -> Point {
    Point::new(
        bounds.0.x - radius - OFFSET_X * cell,
        bounds.0.y - radius - OFFSET_Y * cell,
    )
}

/// A raster over the inflated bounding box of a set of segments.
struct Raster<'a> {
    segments: &'a [(Point, Point)],
    radius: f64,
    cell: f64,
    origin: Point,
    rows: i64,
    /// Inclusive row range covered by each segment's capsule.
    row_range: Vec<(i64, i64)>,
}

impl<'a> Raster<'a> {
    fn new(
        segments: &'a [(Point, Point)],
        epsilon: f64,
        cell: f64,
        bounds: (Point, Point),
    ) -> Self {
        let radius = 0.5 * epsilon;
        let origin = grid_origin(bounds, radius, cell);
        let rows = ((bounds.1.y - bounds.0.y + 2.0 * radius) / cell).ceil() as i64 + 2;
        let row_range = segments
            .iter()
            .map(|&(a, b)| {
                let y0 = a.y.min(b.y) - radius;
                let y1 = a.y.max(b.y) + radius;
                let first = ((y0 - origin.y) / cell - 0.5).floor() as i64 + 1;
                let last = ((y1 - origin.y) / cell - 0.5).ceil() as i64 - 1;
                (first.max(0), last.min(rows - 1))
            })
            .collect();
        Raster {
            segments,
            radius,
            cell,
            origin,
            rows,
            row_range,
        }
    }

    fn work(&self) -> u128 {
        self.row_range
            .iter()
            .map(|&(f, l)| (l - f + 1).max(0) as u128)
            .sum()
    }

    /// Columns whose centres fall strictly inside the open interval `(lo, hi)`.
    fn columns(&self, lo: f64, hi: f64) -> (i64, i64) {
        let first = ((lo - self.origin.x) / self.cell - 0.5).floor() as i64 + 1;
        let last = ((hi - self.origin.x) / self.cell - 0.5).ceil() as i64 - 1;
        (first, last)
    }

    /// Cells inside the sausage for rows `start..end`.
    fn count_rows(&self, start: i64, end: i64, candidates: &[u32]) -> u64 {
        let mut order: Vec<u32> = candidates.to_vec();
        order.sort_unstable_by_key(|&s| self.row_range[s as usize].0);
        let mut next = 0;
        let mut active: Vec<u32> = Vec::new();
        let mut runs: Vec<(i64, i64)> = Vec::new();
        let mut total = 0u64;
        for row in start..end {
            while next < order.len() && self.row_range[order[next] as usize].0 <= row {
                active.push(order[next]);
                next += 1;
            }
            active.retain(|&s| self.row_range[s as usize].1 >= row);
            if active.is_empty() {
                if next == order.len() {
                    break;
                }
                continue;
            }
            let yc = self.origin.y + (row as f64 + 0.5) * self.cell;
            runs.clear();
            for &s in &active {
                let (a, b) = self.segments[s as usize];
                if let Some((lo, hi)) = capsule_span(a, b, self.radius, yc) {
                    let (c0, c1) = self.columns(lo, hi);
                    if c0 <= c1 {
                        runs.push((c0, c1));
                    }
                }
            }
            runs.sort_unstable();
            let mut iter = runs.iter();
            if let Some(&(mut cur_lo, mut cur_hi)) = iter.next() {
                for &(lo, hi) in iter {
                    if lo > cur_hi + 1 {
                        total += (cur_hi - cur_lo + 1) as u64;
                        cur_lo = lo;
                        cur_hi = hi;
                    } else {
                        cur_hi = cur_hi.max(hi);
                    }
                }
                total += (cur_hi - cur_lo + 1) as u64;
            }
        }
        total
    }

    /// Total count of cell centres inside the sausage.
    fn count(&self) -> u64 {
        let chunks = (rayon::current_num_threads() as i64 * 8).clamp(1, self.rows.max(1));
        let chunk_rows = (self.rows + chunks - 1) / chunks;
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); chunks as usize];
        for (s, &(f, l)) in self.row_range.iter().enumerate() {
            if f > l {
                continue;
            }
            for c in f / chunk_rows..=l / chunk_rows {
                buckets[c as usize].push(s as u32);
            }
        }
        buckets
            .par_iter()
            .enumerate()
            .map(|(c, members)| {
                let start = c as i64 * chunk_rows;
                let end = (start + chunk_rows).min(self.rows);
                if members.is_empty() {
                    0
                } else {
                    self.count_rows(start, end, members)
                }
            })
            .sum()
    }
}

fn check_inputs(p: &Polyline, epsilon: f64, budget: &Budget) -> Result<()> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    budget.check_segment_count(p.segment_count())
}

/// Counted cells and their area at a fixed cell size.
pub fn raster_area(p: &Polyline, epsilon: f64, cell: f64, budget: &Budget) -> Result<(u64, f64)> {
    check_inputs(p, epsilon, budget)?;
    if !(cell.is_finite() && cell > 0.0) {
        return Err(Error::invalid(format!("cell size {cell} must be positive")));
    }
    let segments: Vec<(Point, Point)> = p.segments().collect();
    raster_pass(&segments, epsilon, cell, p.bounds(), budget)
}

fn raster_pass(
    segments: &[(Point, Point)],
    epsilon: f64,
    cell: f64,
    bounds: (Point, Point),
    budget: &Budget,
) -> Result<(u64, f64)> {
    let raster = Raster::new(segments, epsilon, cell, bounds);
    let work = raster.work();
    if work > budget.max_raster_work as u128 {
        return Err(Error::Budget {
            what: "raster row spans",
            requested: work,
            limit: budget.max_raster_work as u128,
        });
    }
    let n = raster.count();
    Ok((n, n as f64 * cell * cell))
}

/// Area of the ε-Minkowski sausage of `p`, refined until two successive
/// halvings of the cell each change the area by at most `tol` (relative).
pub fn sausage_area(
    p: &Polyline,
    epsilon: f64,
    tol: f64,
    budget: &Budget,
) -> Result<SausageEstimate> {
    check_inputs(p, epsilon, budget)?;
    if !(tol > 0.0 && tol <= MAX_TOLERANCE) {
        return Err(Error::invalid(format!(
            "raster tolerance {tol} must lie in (0, {MAX_TOLERANCE}]"
        )));
    }
    let segments: Vec<(Point, Point)> = p.segments().collect();
    let bounds = p.bounds();
    let mut cell = epsilon / INITIAL_CELLS_PER_EPSILON;
    let (_, mut prev) = raster_pass(&segments, epsilon, cell, bounds, budget)?;
    let mut settled = false;
    for _ in 0..MAX_REFINEMENTS {
        cell *= 0.5;
        let (cells_inside, area) = raster_pass(&segments, epsilon, cell, bounds, budget)?;
        let delta = (area - prev).abs() / area;
        let converged = delta <= tol;
        if converged && settled {
            return Ok(SausageEstimate {
                area,
                epsilon,
                cell,
                refinement_delta: delta,
                cells_inside,
            });
        }
        settled = converged;
        prev = area;
    }
    Err(Error::Samples(format!(
        "sausage area did not settle to {tol} after {MAX_REFINEMENTS} refinements"
    )))
}
