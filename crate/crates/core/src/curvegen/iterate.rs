use rayon::prelude::*;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::model::GeneratorRule;
use crate::point::Point;

use super::Polyline;

/// Below this many parent segments a level is expanded on the calling thread.
const PARALLEL_THRESHOLD: usize = 4096;

/// A step-k iterate together with, for every segment, how many times each
/// generator index occurs in the composition of maps that produced it.
#[derive(Debug, Clone)]
pub struct LabeledIterate {
    pub polyline: Polyline,
    /// `exponents[s][j]` is the exponent of `a_{j+1}` in the length of segment `s`.
    pub exponents: Vec<Vec<u32>>,
}

struct Level {
    vertices: Vec<Point>,
    /// Orientation parity of the similarity carrying the unit segment onto each segment.
    reflected: Vec<bool>,
    /// Flattened per-segment exponent vectors (stride N), when tracked.
    exponents: Option<Vec<u32>>,
}

/// One substitution step: every segment is replaced by a copy of the generator.
///
/// Segment endpoints are inherited unchanged, so shared vertices stay bit-identical
/// across levels and the curve's endpoints never drift.
fn substitute(rule: &GeneratorRule, level: &Level) -> Level {
    let gen = rule.vertices();
    let flags = rule.flags();
    let n = rule.segment_count();
    let inner = &gen[1..n];

    let expand = |s: usize| {
        let p = level.vertices[s];
        let q = level.vertices[s + 1];
        let d = q - p;
        let refl = level.reflected[s];
        let mut verts = Vec::with_capacity(n);
        verts.push(p);
        verts.extend(
            inner
                .iter()
                .map(|&w| p + d.cmul(if refl { w.conj() } else { w })),
        );
        let parity: Vec<bool> = flags.iter().map(|&f| f ^ refl).collect();
        let exps = level.exponents.as_ref().map(|e| {
            let parent = &e[s * n..(s + 1) * n];
            let mut out = Vec::with_capacity(n * n);
            for j in 0..n {
                out.extend_from_slice(parent);
                out[j * n + j] += 1;
            }
            out
        });
        (verts, parity, exps)
    };

    let segs = level.reflected.len();
    let pieces: Vec<_> = if segs >= PARALLEL_THRESHOLD {
        (0..segs).into_par_iter().map(expand).collect()
    } else {
        (0..segs).map(expand).collect()
    };

    let mut vertices = Vec::with_capacity(segs * n + 1);
    let mut reflected = Vec::with_capacity(segs * n);
    let mut exponents = level
        .exponents
        .as_ref()
        .map(|_| Vec::with_capacity(segs * n * n));
    for (v, r, e) in pieces {
        vertices.extend(v);
        reflected.extend(r);
        if let (Some(all), Some(e)) = (exponents.as_mut(), e) {
            all.extend(e);
        }
    }
    vertices.push(*level.vertices.last().expect("level has vertices"));
    Level {
        vertices,
        reflected,
        exponents,
    }
}

fn iterate(rule: &GeneratorRule, k: u32, budget: &Budget, track: bool) -> Result<Level> {
    budget.check_segments(rule.segment_count(), k)?;
    let n = rule.segment_count();
    let mut level = Level {
        vertices: vec![Point::ORIGIN, Point::new(1.0, 0.0)],
        reflected: vec![false],
        exponents: track.then(|| vec![0; n]),
    };
    for _ in 0..k {
        level = substitute(rule, &level);
    }
    Ok(level)
}

/// The step-`k` polygonal `p_k`: the unit segment with the generator substituted
/// into every segment `k` times. Has `N^k` segments and runs from (0,0) to (1,0).
pub fn contract_iterate(rule: &GeneratorRule, k: u32, budget: &Budget) -> Result<Polyline> {
    let level = iterate(rule, k, budget, false)?;
    Ok(Polyline::from_raw(level.vertices))
}

/// Like [`contract_iterate`], also recording each segment's exponent configuration.
pub fn contract_iterate_labeled(
    rule: &GeneratorRule,
    k: u32,
    budget: &Budget,
) -> Result<LabeledIterate> {
    let n = rule.segment_count();
    let level = iterate(rule, k, budget, true)?;
    let flat = level.exponents.expect("tracked");
    Ok(LabeledIterate {
        polyline: Polyline::from_raw(level.vertices),
        exponents: flat.chunks(n).map(<[u32]>::to_vec).collect(),
    })
}

/// Scale factor `(1/a_i)^k` of the expanded iterate; `i` is 1-based.
pub fn expansion_factor(rule: &GeneratorRule, i: usize, k: u32) -> Result<f64> {
    let a = ratio_at(rule, i)?;
    let f = (1.0 / a).powi(k as i32);
    if !f.is_finite() {
        return Err(Error::Overflow(format!("(1/{a})^{k} is not representable")));
    }
    Ok(f)
}

pub(crate) fn ratio_at(rule: &GeneratorRule, i: usize) -> Result<f64> {
    let n = rule.segment_count();
    if i == 0 || i > n {
        return Err(Error::invalid(format!(
            "ratio index {i} is outside 1..={n}"
        )));
    }
    Ok(rule.ratios()[i - 1])
}

/// The expanded polygonal `p'_k = (1/a_i)^k · p_k`, anchored at the origin.
/// `i` is 1-based.
pub fn expand_iterate(rule: &GeneratorRule, i: usize, k: u32, budget: &Budget) -> Result<Polyline> {
    let factor = expansion_factor(rule, i, k)?;
    let base = contract_iterate(rule, k, budget)?;
    if factor == 1.0 {
        return Ok(base);
    }
    base.scaled(factor)
}
