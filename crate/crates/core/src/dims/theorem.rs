//! Numeric checks of the ordering and equality results relating the Mendès
//! France dimensions of the expanded curves `Γ^{a_i}` to the Hausdorff
//! dimension of the fractal.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use super::closed::{
    hausdorff_dimension, mf_dimension_resolvable, theorem2_lower_bound, MORAN_TOL,
};
use super::estimate::{mf_dimension_estimate, DimensionEstimate, EstimateConfig};
use crate::error::{Error, Result};
use crate::model::{distinct_slots, GeneratorRule};

pub const THEOREM1_NAME: &str = "theorem1";
pub const THEOREM2_NAME: &str = "theorem2";
pub const DEFAULT_THEOREM1_TOL: f64 = 0.08;
pub const DEFAULT_ORDERING_SLACK: f64 = 0.03;
pub const DEFAULT_THEOREM2_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub estimate: EstimateConfig,
    pub ks: RangeInclusive<u32>,
    /// Allowed gap between the last estimate and the Hausdorff dimension.
    pub theorem1_tol: f64,
    /// Allowed decrease between estimates of consecutive ratios.
    pub ordering_slack: f64,
    /// Allowed shortfall of non-resolvable estimates below the lower bound.
    pub theorem2_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            estimate: EstimateConfig::default(),
            ks: 2..=7,
            theorem1_tol: DEFAULT_THEOREM1_TOL,
            ordering_slack: DEFAULT_ORDERING_SLACK,
            theorem2_tol: DEFAULT_THEOREM2_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    /// Preconditions not met; the check was skipped.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub name: String,
    pub verdict: Verdict,
    /// Every quantity the verdict depends on, in a stable order.
    pub details: Vec<(String, f64)>,
    pub tolerance: f64,
    pub note: Option<String>,
}

impl TheoremReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    /// Re-derives the verdict from `details` and `tolerance` alone.
    pub fn recheck(&self) -> Verdict {
        if self.verdict == Verdict::NotApplicable {
            return Verdict::NotApplicable;
        }
        let estimates: Vec<f64> = (1..)
            .map_while(|r| self.detail(&format!("estimate[{r}]")))
            .collect();
        let ok = match self.name.as_str() {
            THEOREM1_NAME => {
                let slack = self.detail("ordering_slack").unwrap_or(0.0);
                let d_h = self.detail("hausdorff").unwrap_or(f64::NAN);
                let ordered = estimates.windows(2).all(|w| w[1] >= w[0] - slack);
                let last = estimates.last().copied().unwrap_or(f64::NAN);
                ordered && (last - d_h).abs() <= self.tolerance
            }
            THEOREM2_NAME => {
                let closed = self.detail("resolvable_closed_form").unwrap_or(f64::NAN);
                let bound = self.detail("lower_bound").unwrap_or(f64::NAN);
                closed < bound && estimates[1..].iter().all(|&e| e >= bound - self.tolerance)
            }
            _ => false,
        };
        if ok {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }
}

/// One representative (1-based) index per distinct ratio value, ascending by value.
pub fn distinct_indices(rule: &GeneratorRule) -> Vec<(f64, usize)> {
    let slots = distinct_slots(rule.ratios());
    rule.distinct_ratios()
        .into_iter()
        .enumerate()
        .map(|(g, (v, _))| {
            (
                v,
                slots
                    .iter()
                    .position(|&s| s == g)
                    .expect("group is populated")
                    + 1,
            )
        })
        .collect()
}

/// Mendès France estimates for every distinct ratio value, keyed by rank
/// (1 = smallest ratio).
pub fn estimate_all(
    rule: &GeneratorRule,
    cfg: &VerifyConfig,
) -> Result<BTreeMap<usize, (f64, DimensionEstimate)>> {
    let reps = distinct_indices(rule);
    let results = reps
        .par_iter()
        .map(|&(v, i)| {
            mf_dimension_estimate(rule, i, cfg.ks.clone(), &cfg.estimate).map(|e| (v, e))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(results
        .into_iter()
        .enumerate()
        .map(|(r, e)| (r + 1, e))
        .collect())
}

/// Ordering of the estimates by ratio and equality of the last with the
/// Hausdorff dimension.
pub fn verify_theorem1(rule: &GeneratorRule, cfg: &VerifyConfig) -> Result<TheoremReport> {
    let estimates = estimate_all(rule, cfg)?;
    theorem1_from(rule, &estimates, cfg)
}

pub fn theorem1_from(
    rule: &GeneratorRule,
    estimates: &BTreeMap<usize, (f64, DimensionEstimate)>,
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    let d_h = hausdorff_dimension(rule.ratios(), MORAN_TOL)?;
    let mut details = vec![
        ("hausdorff".to_string(), d_h),
        ("ordering_slack".to_string(), cfg.ordering_slack),
    ];
    for (rank, (v, est)) in estimates {
        details.push((format!("ratio[{rank}]"), *v));
        details.push((format!("estimate[{rank}]"), est.slope));
        details.push((format!("last_ratio[{rank}]"), est.last_ratio()));
    }
    let slopes: Vec<f64> = estimates.values().map(|(_, e)| e.slope).collect();
    let ordered = slopes.windows(2).all(|w| w[1] >= w[0] - cfg.ordering_slack);
    let last = *slopes
        .last()
        .ok_or_else(|| Error::Samples("no estimates".into()))?;
    let gap = last - d_h;
    details.push(("equality_gap".to_string(), gap));
    let verdict = if ordered && gap.abs() <= cfg.theorem1_tol {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    let note = (!ordered).then(|| "estimates are not ordered by ratio".to_string());
    Ok(TheoremReport {
        name: THEOREM1_NAME.into(),
        verdict,
        details,
        tolerance: cfg.theorem1_tol,
        note,
    })
}

/// Strict separation of the resolvable dimension from every other expanded
/// curve, through the closed-form lower bound.
pub fn verify_theorem2(rule: &GeneratorRule, cfg: &VerifyConfig) -> Result<TheoremReport> {
    if let Some(report) = theorem2_precondition(rule, cfg) {
        return Ok(report);
    }
    let estimates = estimate_all(rule, cfg)?;
    theorem2_from(rule, &estimates, cfg)
}

fn theorem2_precondition(rule: &GeneratorRule, cfg: &VerifyConfig) -> Option<TheoremReport> {
    match theorem2_lower_bound(rule.ratios()) {
        Err(Error::NotApplicable(reason)) => Some(TheoremReport {
            name: THEOREM2_NAME.into(),
            verdict: Verdict::NotApplicable,
            details: Vec::new(),
            tolerance: cfg.theorem2_tol,
            note: Some(reason),
        }),
        _ => None,
    }
}

pub fn theorem2_from(
    rule: &GeneratorRule,
    estimates: &BTreeMap<usize, (f64, DimensionEstimate)>,
    cfg: &VerifyConfig,
) -> Result<TheoremReport> {
    if let Some(report) = theorem2_precondition(rule, cfg) {
        return Ok(report);
    }
    let closed = mf_dimension_resolvable(rule.ratios())?;
    let bound = theorem2_lower_bound(rule.ratios())?;
    let mut details = vec![
        ("resolvable_closed_form".to_string(), closed),
        ("lower_bound".to_string(), bound),
        ("strictness_gap".to_string(), bound - closed),
    ];
    let mut above = true;
    for (rank, (v, est)) in estimates {
        details.push((format!("ratio[{rank}]"), *v));
        details.push((format!("estimate[{rank}]"), est.slope));
        if *rank >= 2 && est.slope < bound - cfg.theorem2_tol {
            above = false;
        }
    }
    let verdict = if closed < bound && above {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    Ok(TheoremReport {
        name: THEOREM2_NAME.into(),
        verdict,
        details,
        tolerance: cfg.theorem2_tol,
        note: None,
    })
}

/// Both reports from one shared set of estimates.
pub fn verify_theorems(
    rule: &GeneratorRule,
    cfg: &VerifyConfig,
) -> Result<(TheoremReport, TheoremReport)> {
    let estimates = estimate_all(rule, cfg)?;
    Ok((
        theorem1_from(rule, &estimates, cfg)?,
        theorem2_from(rule, &estimates, cfg)?,
    ))
}
