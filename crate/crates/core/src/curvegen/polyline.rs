use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::point::Point;

/// An open chain of planar vertices.
///
/// Holds at least two vertices and no two consecutive vertices coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    vertices: Vec<Point>,
}

/// Segment-length summary of a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthStats {
    pub total: f64,
    pub min_seg: f64,
    pub max_seg: f64,
    pub count: usize,
}

impl Polyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid(format!(
                "a polyline needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite vertex {v}")));
        }
        if let Some(i) = vertices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!(
                "vertices {} and {} coincide at {}",
                i,
                i + 1,
                vertices[i]
            )));
        }
        Ok(Polyline { vertices })
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_raw(vertices: Vec<Point>) -> Self {
        debug_assert!(vertices.len() >= 2);
        Polyline { vertices }
    }

    pub fn unit_segment() -> Self {
        Polyline::from_raw(vec![Point::ORIGIN, Point::new(1.0, 0.0)])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segments(&self) -> impl ExactSizeIterator<Item = (Point, Point)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn first(&self) -> Point {
        self.vertices[0]
    }

    pub fn last(&self) -> Point {
        self.vertices[self.vertices.len() - 1]
    }

    /// Uniform scaling about the origin.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid(format!(
                "scale factor {factor} must be finite and positive"
            )));
        }
        let vertices: Vec<Point> = self.vertices.iter().map(|&v| v * factor).collect();
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::Overflow(format!("scaling by {factor} overflows")));
        }
        Polyline::new(vertices)
    }

    pub fn translated(&self, by: Point) -> Result<Self> {
        Polyline::new(self.vertices.iter().map(|&v| v + by).collect())
    }

    /// Rotation about the origin by `angle` radians.
    pub fn rotated(&self, angle: f64) -> Result<Self> {
        let rot = Point::new(angle.cos(), angle.sin());
        Polyline::new(self.vertices.iter().map(|&v| v.cmul(rot)).collect())
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Polyline { vertices }
    }

    /// Joins `other` onto the end of `self`; a shared junction vertex is kept once.
    pub fn concat(&self, other: &Polyline) -> Self {
        let mut vertices = self.vertices.clone();
        let skip = usize::from(self.last() == other.first());
        vertices.extend_from_slice(&other.vertices[skip..]);
        Polyline { vertices }
    }

    /// Axis-aligned bounding box as (min, max) corners.
    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = self.vertices[0];
        let mut hi = lo;
        for v in &self.vertices[1..] {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }

    pub fn length_stats(&self) -> LengthStats {
        length_stats(self)
    }

    /// One `x y` pair per line, shortest round-trip decimals.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.vertices.len() * 24);
        for v in &self.vertices {
            let _ = writeln!(out, "{} {}", v.x, v.y);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.parse::<f64>().ok())
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: idx + 1,
                        message: format!("expected `x y`, got {line:?}"),
                    })
            };
            let x = parse(parts.next())?;
            let y = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("trailing data in {line:?}"),
                });
            }
            vertices.push(Point::new(x, y));
        }
        Polyline::new(vertices)
    }

    /// A standalone SVG 1.1 document showing the polyline as one path.
    ///
    /// The view box is the bounding box with a 5% margin and the y axis points up.
    pub fn to_svg(&self, opts: &SvgOptions) -> String {
        let (lo, hi) = self.bounds();
        let w = hi.x - lo.x;
        let h = hi.y - lo.y;
        let span = w.max(h);
        let margin = 0.05 * span;
        let stroke = span / 500.0 * opts.stroke_scale;
        let mut path = String::with_capacity(self.vertices.len() * 24);
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = write!(
                path,
                "{}{} {}",
                if i == 0 { "M" } else { " L" },
                v.x,
                0.0 - v.y
            );
        }
        format!(
            concat!(
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" ",
                "width=\"{width}\" height=\"{height}\" viewBox=\"{vx} {vy} {vw} {vh}\">\n",
                "<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{stroke}\" ",
                "stroke-linejoin=\"round\" stroke-linecap=\"round\"/>\n",
                "</svg>\n"
            ),
            width = opts.width,
            height = opts.height,
            vx = lo.x - margin,
            vy = -hi.y - margin,
            vw = w + 2.0 * margin,
            vh = h + 2.0 * margin,
            path = path,
            color = opts.color,
            stroke = stroke,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    pub width: u32,
    pub height: u32,
    /// Multiplier on the default stroke width of diameter / 500.
    pub stroke_scale: f64,
    pub color: String,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            width: 800,
            height: 800,
            stroke_scale: 1.0,
            color: "black".into(),
        }
    }
}

/// Exact-as-possible segment length totals (compensated summation) and extrema.
pub fn length_stats(p: &Polyline) -> LengthStats {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut min_seg = f64::INFINITY;
    let mut max_seg = 0.0f64;
    for (a, b) in p.segments() {
        let len = a.dist(b);
        min_seg = min_seg.min(len);
        max_seg = max_seg.max(len);
        // Neumaier summation
        let t = sum + len;
        if sum.abs() >= len {
            comp += (sum - t) + len;
        } else {
            comp += (len - t) + sum;
        }
        sum = t;
    }
    LengthStats {
        total: sum + comp,
        min_seg,
        max_seg,
        count: p.segment_count(),
    }
}
