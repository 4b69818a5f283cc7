//! Numeric dimension estimates from sausage areas of finite-step curves.
//!
//! The Mendès France estimate samples `(log C, log A)` for a growing curve
//! (hull perimeter `C`, sausage area `A`) and reports both the raw ratio
//! `log A / log C` per sample and the least-squares slope of `log A` against
//! `log C` over the trailing samples. The slope is the headline value: the
//! unknown multiplicative constants in `A` and `C` become intercepts and drop
//! out, while the ratio converges only logarithmically.

use std::ops::RangeInclusive;

use log::warn;
use rayon::prelude::*;

use crate::budget::Budget;
use crate::curvegen::{contract_iterate, expand_iterate, Polyline};
use crate::error::{Error, Result};
use crate::geom::{convex_hull, sausage_area};
use crate::model::GeneratorRule;

pub const DEFAULT_EPSILON: f64 = 1.0;
pub const DEFAULT_RASTER_TOL: f64 = 0.01;
pub const MIN_FIT_WINDOW: usize = 3;
/// Spiral families need at least this many usable samples.
pub const MIN_SPIRAL_SAMPLES: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateConfig {
    /// Sausage width ε.
    pub epsilon: f64,
    /// Relative refinement tolerance of the sausage rasterizer.
    pub raster_tol: f64,
    /// Trailing samples used for the slope; `None` picks `max(3, ⌈n/2⌉)`.
    pub fit_window: Option<usize>,
    pub budget: Budget,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            epsilon: DEFAULT_EPSILON,
            raster_tol: DEFAULT_RASTER_TOL,
            fit_window: None,
            budget: Budget::default(),
        }
    }
}

/// One point of a Mendès France sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Step `k` for iterates, arc length `L` for spiral families.
    pub step: f64,
    pub log_c: f64,
    pub log_a: f64,
    /// `log_a / log_c`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub samples: Vec<Sample>,
    /// Least-squares slope of `log_a` on `log_c` over the trailing `fit_window` samples.
    pub slope: f64,
    pub fit_window: usize,
    pub epsilon: f64,
    /// Notes on dropped samples.
    pub warnings: Vec<String>,
}

impl DimensionEstimate {
    pub fn last_ratio(&self) -> f64 {
        self.samples.last().map_or(f64::NAN, |s| s.ratio)
    }
}

/// Least-squares slope of `ys` on `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Samples(format!(
            "slope fit needs two or more paired values, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::Samples("abscissae do not vary".into()));
    }
    let slope = sxy / sxx;
    if !slope.is_finite() {
        return Err(Error::Samples("slope is not finite".into()));
    }
    Ok(slope)
}

pub fn default_fit_window(samples: usize) -> usize {
    MIN_FIT_WINDOW.max(samples.div_ceil(2))
}

fn measure(p: &Polyline, step: f64, cfg: &EstimateConfig) -> Result<(f64, f64, f64)> {
    let hull = convex_hull(p)?;
    let area = sausage_area(p, cfg.epsilon, cfg.raster_tol, &cfg.budget)?;
    Ok((step, hull.perimeter.ln(), area.area.ln()))
}

fn assemble(
    raw: Vec<(f64, f64, f64)>,
    cfg: &EstimateConfig,
    min_samples: usize,
) -> Result<DimensionEstimate> {
    let mut samples = Vec::with_capacity(raw.len());
    let mut warnings = Vec::new();
    for (step, log_c, log_a) in raw {
        if log_c <= 0.0 {
            let msg = format!("dropped sample at step {step}: log C = {log_c} is not positive");
            warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        samples.push(Sample {
            step,
            log_c,
            log_a,
            ratio: log_a / log_c,
        });
    }
    if samples.len() < min_samples {
        return Err(Error::Samples(format!(
            "{} usable samples, need at least {min_samples}",
            samples.len()
        )));
    }
    let window = cfg
        .fit_window
        .unwrap_or_else(|| default_fit_window(samples.len()))
        .max(MIN_FIT_WINDOW);
    if window > samples.len() {
        return Err(Error::Samples(format!(
            "fit window {window} exceeds the {} usable samples",
            samples.len()
        )));
    }
    let tail = &samples[samples.len() - window..];
    let xs: Vec<f64> = tail.iter().map(|s| s.log_c).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.log_a).collect();
    let slope = least_squares_slope(&xs, &ys)?;
    Ok(DimensionEstimate {
        samples,
        slope,
        fit_window: window,
        epsilon: cfg.epsilon,
        warnings,
    })
}

fn check_range(ks: &RangeInclusive<u32>) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::invalid(format!("empty step range {ks:?}")));
    }
    Ok(())
}

/// Mendès France estimate of the expanded curve `Γ^{a_i}` (1-based `i`) from
/// the iterates `p'_k`, `k ∈ ks`.
pub fn mf_dimension_estimate(
    rule: &GeneratorRule,
    i: usize,
    ks: RangeInclusive<u32>,
    cfg: &EstimateConfig,
) -> Result<DimensionEstimate> {
    check_range(&ks)?;
    cfg.budget.check_segments(rule.segment_count(), *ks.end())?;
    crate::curvegen::ratio_at(rule, i)?;
    let raw = ks
        .collect::<Vec<u32>>()
        .into_par_iter()
        .map(|k| {
            let p = expand_iterate(rule, i, k, &cfg.budget)?;
            measure(&p, k as f64, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(raw, cfg, MIN_FIT_WINDOW)
}

/// Mendès France estimate of a curve given as a family of initial arcs of
/// strictly increasing length.
pub fn mf_dimension_estimate_spiral(
    family: &[Polyline],
    cfg: &EstimateConfig,
) -> Result<DimensionEstimate> {
    let lengths: Vec<f64> = family.iter().map(|p| p.length_stats().total).collect();
    if lengths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "arc lengths of the family must strictly increase",
        ));
    }
    let raw = family
        .par_iter()
        .zip(lengths.par_iter())
        .map(|(p, &len)| measure(p, len, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble(raw, cfg, MIN_SPIRAL_SAMPLES)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSample {
    pub k: u32,
    pub log_epsilon: f64,
    pub log_area: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiEstimate {
    pub samples: Vec<ScaleSample>,
    /// Slope of `log A` against `log ε` over the trailing window.
    pub slope: f64,
    pub fit_window: usize,
    /// `2 − slope`
    pub dimension: f64,
}

/// Minkowski–Bouligand estimate from `p_k` at sausage width `ε_k = a_max^k`:
/// `2 − d log A / d log ε`.
pub fn minkowski_dimension_estimate(
    rule: &GeneratorRule,
    ks: RangeInclusive<u32>,
    cfg: &EstimateConfig,
) -> Result<MinkowskiEstimate> {
    check_range(&ks)?;
    cfg.budget.check_segments(rule.segment_count(), *ks.end())?;
    let a_max = rule.max_ratio();
    let samples = ks
        .collect::<Vec<u32>>()
        .into_par_iter()
        .map(|k| {
            let eps = a_max.powi(k as i32);
            let p = contract_iterate(rule, k, &cfg.budget)?;
            let area = sausage_area(&p, eps, cfg.raster_tol, &cfg.budget)?;
            Ok(ScaleSample {
                k,
                log_epsilon: eps.ln(),
                log_area: area.area.ln(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if samples.len() < MIN_FIT_WINDOW {
        return Err(Error::Samples(format!(
            "{} samples, need at least {MIN_FIT_WINDOW}",
            samples.len()
        )));
    }
    let window = cfg
        .fit_window
        .unwrap_or_else(|| default_fit_window(samples.len()))
        .clamp(MIN_FIT_WINDOW, samples.len());
    let tail = &samples[samples.len() - window..];
    let xs: Vec<f64> = tail.iter().map(|s| s.log_epsilon).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.log_area).collect();
    let slope = least_squares_slope(&xs, &ys)?;
    Ok(MinkowskiEstimate {
        samples,
        slope,
        fit_window: window,
        dimension: 2.0 - slope,
    })
}
