//! Segment-replacement rules: the generator polygon, its rule-file format and validation.
//!
//! # Rule-file format
//!
//! A rule file is UTF-8 text, one `key = value` entry per line. Blank lines and
//! lines whose first non-blank character is `#` are ignored. Keys:
//!
//! * `vertices` (required): whitespace-separated `x,y` pairs, no spaces inside a
//!   pair, e.g. `vertices = 0,0 0.5,0.25 1,0`. Coordinates are plain decimals
//!   (`-`, digits, `.`, optional `e` exponent); `inf`/`nan` are rejected.
//!   Parsing is locale-independent.
//! * `flags` (optional): one `0` or `1` per segment; `1` marks a segment whose
//!   copy of the generator is mirrored across the segment. Absent means all `0`.
//! * `name` (optional): free text up to the end of the line.
//!
//! Each key may appear at most once. [`GeneratorRule::to_document`] writes
//! coordinates with the shortest decimal that round-trips, so
//! `parse_rule(rule.to_document())` reproduces the vertices bit for bit.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::budget::Budget;
use crate::curvegen;
use crate::error::{Error, Result};
use crate::geom;
use crate::point::Point;

/// Default depth for the finite self-intersection check.
pub const DEFAULT_VALIDATION_DEPTH: u32 = 4;

/// Slack for comparing a sum of ratios against 1.
const STRAIGHT_SUM_TOL: f64 = 1e-12;

/// The generator polygon `v_0 = (0,0), …, v_N = (1,0)` and its contraction ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorRule {
    name: Option<String>,
    vertices: Vec<Point>,
    flags: Vec<bool>,
    ratios: Vec<f64>,
}

impl GeneratorRule {
    /// Builds a rule, checking anchoring and `0 < a_i < 1`.
    ///
    /// `flags` may be empty (no reflections) or have one entry per segment.
    pub fn new(vertices: Vec<Point>, flags: Vec<bool>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::invalid(format!(
                "a rule needs at least 2 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(bad) = vertices.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite vertex {bad}")));
        }
        let first = vertices[0];
        let last = vertices[vertices.len() - 1];
        if first != Point::ORIGIN {
            return Err(Error::invalid(format!(
                "first vertex must be exactly (0, 0), got {first}"
            )));
        }
        if last != Point::new(1.0, 0.0) {
            return Err(Error::invalid(format!(
                "last vertex must be exactly (1, 0), got {last}"
            )));
        }
        let n = vertices.len() - 1;
        let flags = if flags.is_empty() {
            vec![false; n]
        } else {
            flags
        };
        if flags.len() != n {
            return Err(Error::invalid(format!(
                "{} flags given for {} segments",
                flags.len(),
                n
            )));
        }
        let ratios: Vec<f64> = vertices.windows(2).map(|w| w[1].dist(w[0])).collect();
        for (i, &a) in ratios.iter().enumerate() {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::invalid(format!(
                    "ratio a_{} = {} is outside (0, 1)",
                    i + 1,
                    a
                )));
            }
        }
        Ok(GeneratorRule {
            name: None,
            vertices,
            flags,
            ratios,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        self.name = if name.is_empty() { None } else { Some(name) };
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    /// Contraction ratios `a_i = |v_i - v_{i-1}|` in segment order.
    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }

    /// Number of segments N.
    pub fn segment_count(&self) -> usize {
        self.ratios.len()
    }

    pub fn ratio_sum(&self) -> f64 {
        self.ratios.iter().sum()
    }

    pub fn min_ratio(&self) -> f64 {
        self.ratios.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// True when every vertex lies on the x-axis in increasing order (`Σ a_i = 1`).
    pub fn is_straight(&self) -> bool {
        self.vertices.iter().all(|v| v.y == 0.0)
            && self.vertices.windows(2).all(|w| w[1].x > w[0].x)
    }

    /// Distinct ratio values in ascending order, with multiplicities.
    pub fn distinct_ratios(&self) -> Vec<(f64, usize)> {
        distinct_values(&self.ratios)
    }

    /// Serializes to the rule-file format.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            let _ = writeln!(out, "name = {name}");
        }
        out.push_str("vertices =");
        for v in &self.vertices {
            let _ = write!(out, " {},{}", v.x, v.y);
        }
        out.push('\n');
        if self.flags.iter().any(|&f| f) {
            out.push_str("flags =");
            for &f in &self.flags {
                out.push_str(if f { " 1" } else { " 0" });
            }
            out.push('\n');
        }
        out
    }
}

/// Relative tolerance under which two ratios count as the same value.
pub const RATIO_MERGE_TOL: f64 = 1e-9;

/// Ascending distinct values of `values` with their multiplicities. Values
/// within [`RATIO_MERGE_TOL`] (relative) of the smallest member of a group
/// join that group, which is represented by its smallest member.
pub fn distinct_values(values: &[f64]) -> Vec<(f64, usize)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, usize)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((first, count)) if v - *first <= RATIO_MERGE_TOL * first.abs() => *count += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// For each entry of `values`, the index of its group in [`distinct_values`].
pub fn distinct_slots(values: &[f64]) -> Vec<usize> {
    let distinct = distinct_values(values);
    values
        .iter()
        .map(|&v| {
            distinct
                .iter()
                .rposition(|&(first, _)| first <= v)
                .expect("every value belongs to a group")
        })
        .collect()
}

/// Parses a rule file (see the module docs for the format).
pub fn parse_rule(document: &str) -> Result<GeneratorRule> {
    let mut entries: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (idx, raw) in document.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected `key = value`, got {line:?}"),
        })?;
        let key = key.trim();
        if !matches!(key, "vertices" | "flags" | "name") {
            return Err(Error::Parse {
                line: line_no,
                message: format!("unknown key {key:?}"),
            });
        }
        if entries.insert(key, (line_no, value.trim())).is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate key {key:?}"),
            });
        }
    }

    let (vline, vtext) = entries.get("vertices").copied().ok_or(Error::Parse {
        line: 0,
        message: "missing `vertices`".into(),
    })?;
    let vertices = vtext
        .split_whitespace()
        .map(|tok| {
            parse_pair(tok).map_err(|message| Error::Parse {
                line: vline,
                message,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let flags = match entries.get("flags") {
        None => Vec::new(),
        Some(&(fline, ftext)) => ftext
            .split_whitespace()
            .map(|tok| match tok {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::Parse {
                    line: fline,
                    message: format!("flag must be 0 or 1, got {other:?}"),
                }),
            })
            .collect::<Result<Vec<_>>>()?,
    };

    let rule = GeneratorRule::new(vertices, flags)?;
    Ok(match entries.get("name") {
        Some(&(_, name)) => rule.with_name(name),
        None => rule,
    })
}

fn parse_pair(tok: &str) -> std::result::Result<Point, String> {
    let (x, y) = tok
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, got {tok:?}"))?;
    Ok(Point::new(parse_decimal(x)?, parse_decimal(y)?))
}

fn parse_decimal(s: &str) -> std::result::Result<f64, String> {
    let plain = !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | 'e' | 'E'))
        && s.chars().any(|c| c.is_ascii_digit());
    if !plain {
        return Err(format!("not a decimal number: {s:?}"));
    }
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("not a decimal number: {s:?}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub severity: Severity,
    pub text: String,
}

/// Outcome of [`validate_rule`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub ok: bool,
    pub messages: Vec<Finding>,
    pub checked_depth: u32,
}

impl ValidationReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.messages
            .iter()
            .filter(|f| f.severity == Severity::Error)
    }
}

/// Checks the rule invariants and that the depth-`depth` iterate has no
/// self-intersection. A budget overrun is returned as an error, not as a
/// failed report.
pub fn validate_rule(
    rule: &GeneratorRule,
    depth: u32,
    budget: &Budget,
) -> Result<ValidationReport> {
    if depth < 1 {
        return Err(Error::invalid("validation depth must be at least 1"));
    }
    budget.check_segments(rule.segment_count(), depth)?;

    let mut messages = Vec::new();
    let sum = rule.ratio_sum();
    if sum < 1.0 - STRAIGHT_SUM_TOL {
        messages.push(Finding {
            severity: Severity::Error,
            text: format!("ratio sum {sum} is below 1"),
        });
    }
    if rule.is_straight() {
        messages.push(Finding {
            severity: Severity::Info,
            text: "degenerate: straight line".into(),
        });
    } else if (sum - 1.0).abs() <= STRAIGHT_SUM_TOL {
        messages.push(Finding {
            severity: Severity::Warning,
            text: format!("ratio sum {sum} is 1 but the vertices are not in order on the x-axis"),
        });
    }

    let curve = curvegen::contract_iterate(rule, depth, budget)?;
    if geom::self_intersects(&curve) {
        messages.push(Finding {
            severity: Severity::Error,
            text: format!("iterate at depth {depth} intersects itself"),
        });
    }

    let ok = !messages.iter().any(|f| f.severity == Severity::Error);
    Ok(ValidationReport {
        ok,
        messages,
        checked_depth: depth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules;

    fn circle_intersection(c0: Point, r0: f64, c1: Point, r1: f64) -> Point {
        // upper intersection point of two circles
        let d = c1.dist(c0);
        let a = (r0 * r0 - r1 * r1 + d * d) / (2.0 * d);
        let h = (r0 * r0 - a * a).sqrt();
        let u = (c1 - c0) * (1.0 / d);
        c0 + u * a + Point::new(-u.y, u.x) * h
    }

    #[test]
    fn koch_document_gives_four_thirds() {
        let rule = parse_rule(rules::KOCH).unwrap();
        assert_eq!(rule.segment_count(), 4);
        for &a in rule.ratios() {
            assert!((a - 1.0 / 3.0).abs() < 1e-15, "{a}");
        }
        assert_eq!(rule.name(), Some("koch"));
    }

    #[test]
    fn mixed_rule_vertex_matches_circle_intersection() {
        let rule = parse_rule(rules::MIXED_345).unwrap();
        let apex = circle_intersection(Point::new(0.3, 0.0), 0.4, Point::new(1.0, 0.0), 0.5);
        assert!(rule.vertices()[2].dist(apex) < 1e-15);
        let r = rule.ratios();
        assert!((r[0] - 0.3).abs() < 1e-15);
        assert!((r[1] - 0.4).abs() < 1e-15);
        assert!((r[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_rule_rejected() {
        let err = parse_rule("vertices = 0,0 1,0").unwrap_err();
        assert!(matches!(err, Error::Invalid(ref m) if m.contains("outside (0, 1)")));
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(parse_rule(""), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_rule("vertices 0,0 1,0"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_rule("vertices = 0,0 0.5;0 1,0"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_rule("vertices = 0,0 inf,0 1,0"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_rule("vertices = 0,0 0x1,0 1,0"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_rule("vertices = 0,0 0.5,0 1,0\nvertices = 0,0 1,0"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_rule("colour = red"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_rule("vertices = 0,0 0.5,0 1,0\nflags = 0 2"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn anchoring_and_vertex_count() {
        assert!(matches!(
            parse_rule("vertices = 0,0"),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            parse_rule("vertices = 0.1,0 0.5,0 1,0"),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            parse_rule("vertices = 0,0 0.5,0 1,0.1"),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            parse_rule("vertices = 0,0 0,0 1,0"),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            parse_rule("vertices = 0,0 0.5,0 1,0\nflags = 1"),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn flags_default_false_and_round_trip() {
        let rule = parse_rule("# demo\nvertices = 0,0 0.5,0.1 1,0\n").unwrap();
        assert_eq!(rule.flags(), &[false, false]);
        let flagged =
            parse_rule("name = zig zag\nvertices = 0,0 0.5,0.1 1,0\nflags = 1 0").unwrap();
        assert_eq!(flagged.flags(), &[true, false]);
        assert_eq!(parse_rule(&flagged.to_document()).unwrap(), flagged);
    }

    #[test]
    fn distinct_ratio_examples() {
        let koch = parse_rule(rules::KOCH).unwrap();
        let d = koch.distinct_ratios();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].1, 4);
        assert!((d[0].0 - 1.0 / 3.0).abs() < 1e-15);

        assert_eq!(
            distinct_values(&[0.3, 0.4, 0.5]),
            vec![(0.3, 1), (0.4, 1), (0.5, 1)]
        );
        assert_eq!(distinct_values(&[0.5, 0.3, 0.5]), vec![(0.3, 1), (0.5, 2)]);
        assert_eq!(
            distinct_values(&[0.5, 0.5 + 1e-14, 0.3]),
            vec![(0.3, 1), (0.5, 2)]
        );
        assert_eq!(
            distinct_slots(&[0.5, 0.3, 0.5 + 1e-14, 0.4]),
            vec![2, 0, 2, 1]
        );
    }

    #[test]
    fn validate_koch_straight_and_crossing() {
        let budget = Budget::default();
        let koch = parse_rule(rules::KOCH).unwrap();
        let report = validate_rule(&koch, 4, &budget).unwrap();
        assert!(report.ok, "{report:?}");
        assert_eq!(report.checked_depth, 4);

        let straight = parse_rule(rules::STRAIGHT).unwrap();
        for depth in 1..=5 {
            let report = validate_rule(&straight, depth, &budget).unwrap();
            assert!(report.ok);
            assert!(report
                .messages
                .iter()
                .any(|f| f.severity == Severity::Info && f.text == "degenerate: straight line"));
        }

        let crossing = parse_rule(rules::CROSSING).unwrap();
        let report = validate_rule(&crossing, 1, &budget).unwrap();
        assert!(!report.ok);
        assert_eq!(report.errors().count(), 1);
    }

    #[test]
    fn validate_budget_is_an_error_not_a_failure() {
        let koch = parse_rule(rules::KOCH).unwrap();
        let budget = Budget {
            max_segments: 100,
            ..Budget::default()
        };
        assert!(matches!(
            validate_rule(&koch, 4, &budget),
            Err(Error::Budget { .. })
        ));
        assert!(validate_rule(&koch, 0, &budget).is_err());
    }
}
