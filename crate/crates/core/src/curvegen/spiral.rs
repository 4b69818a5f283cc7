//! Archimedean and logarithmic spirals, discretized with bounded chordal error.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::point::Point;

use super::Polyline;

/// Chordal deviation allowed for the Archimedean spiral, as a fraction of its step.
const ARCHIMEDEAN_SAGITTA: f64 = 0.01;
/// Chordal deviation allowed for the logarithmic spiral, as a fraction of local radius.
const LOGARITHMIC_SAGITTA: f64 = 0.01;

fn polar(r: f64, theta: f64) -> Point {
    Point::new(r * theta.cos(), r * theta.sin())
}

/// Arc length of `r = a·θ` from 0 to `theta`.
pub fn archimedean_arc_length(step: f64, theta: f64) -> f64 {
    let a = step / TAU;
    0.5 * a * (theta * (1.0 + theta * theta).sqrt() + theta.asinh())
}

/// Polar angle at which the Archimedean spiral of `step` reaches arc length `length`.
pub fn archimedean_angle_for_length(step: f64, length: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while archimedean_arc_length(step, hi) < length {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if archimedean_arc_length(step, mid) < length {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    hi
}

/// The Archimedean spiral `r(θ) = (step/2π)·θ` from the origin, out to arc length
/// `total_length`.
///
/// Angular steps adapt to the local radius of curvature so that every chord
/// deviates from the curve by at most `step / 100`.
pub fn archimedean_spiral(step: f64, total_length: f64) -> Result<Polyline> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::invalid(format!(
            "spiral step {step} must be positive"
        )));
    }
    if !(total_length.is_finite() && total_length > 0.0) {
        return Err(Error::invalid(format!(
            "spiral length {total_length} must be positive"
        )));
    }
    let a = step / TAU;
    let sagitta = ARCHIMEDEAN_SAGITTA * step;
    let theta_end = archimedean_angle_for_length(step, total_length);

    let mut vertices = vec![Point::ORIGIN];
    let mut theta = 0.0f64;
    while theta < theta_end {
        let t2 = theta * theta;
        // curvature radius grows with θ, so the value at the step start bounds the step
        let curvature_radius = a * (1.0 + t2).powf(1.5) / (2.0 + t2);
        let chord = (6.0 * sagitta * curvature_radius).sqrt();
        let dtheta = (chord / (a * (1.0 + t2).sqrt())).min(TAU / 16.0);
        theta = (theta + dtheta).min(theta_end);
        vertices.push(polar(a * theta, theta));
    }
    Polyline::new(vertices)
}

/// Closed-form arc length of `r = e^{bθ}` between radii `r0` and `r1`.
pub fn logarithmic_arc_length(b: f64, r0: f64, r1: f64) -> f64 {
    (1.0 + b * b).sqrt() / b * (r1 - r0)
}

/// The logarithmic spiral `r(θ) = e^{bθ}` for `θ ∈ [0, 2π·turns]`.
///
/// Uses a uniform angular step small enough that every chord deviates from the
/// curve by at most 1% of the local radius.
pub fn logarithmic_spiral(b: f64, turns: f64) -> Result<Polyline> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::invalid(format!("growth rate {b} must be positive")));
    }
    if !(turns.is_finite() && turns >= 1.0) {
        return Err(Error::invalid(format!(
            "turn count {turns} must be at least 1"
        )));
    }
    let theta_end = TAU * turns;
    let r_end = (b * theta_end).exp();
    if !r_end.is_finite() || r_end > 1e150 {
        return Err(Error::Overflow(format!(
            "radius e^({b}·{theta_end}) is out of range"
        )));
    }

    // The tangent turns by dθ per dθ; the curvature radius is r·sqrt(1+b²) and
    // grows by e^{b·dθ} across one step.
    let stretch = (1.0 + b * b).sqrt();
    let mut dtheta = TAU / 8.0;
    while stretch * (b * dtheta).exp() * (1.0 - (0.5 * dtheta).cos()) > LOGARITHMIC_SAGITTA {
        dtheta *= 0.5;
    }
    let steps = (theta_end / dtheta).ceil() as usize;
    if steps > 50_000_000 {
        return Err(Error::Overflow(format!(
            "growth rate {b} needs {steps} vertices"
        )));
    }
    let vertices = (0..=steps)
        .map(|s| {
            let theta = theta_end * s as f64 / steps as f64;
            polar((b * theta).exp(), theta)
        })
        .collect();
    Polyline::new(vertices)
}
