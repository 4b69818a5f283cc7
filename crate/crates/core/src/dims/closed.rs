//! Closed-form and root-finding dimensions of a ratio list.

use crate::error::{Error, Result};
use crate::model::{GeneratorRule, RATIO_MERGE_TOL};

/// Default bracket width for the Moran solver.
pub const MORAN_TOL: f64 = 1e-12;

fn check_ratios(ratios: &[f64]) -> Result<()> {
    if ratios.is_empty() {
        return Err(Error::invalid("ratio list is empty"));
    }
    if let Some(a) = ratios.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
        return Err(Error::invalid(format!("ratio {a} is outside (0, 1)")));
    }
    Ok(())
}

fn min_of(ratios: &[f64]) -> f64 {
    ratios.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `g(x) = Σ a_i^x − 1`, strictly decreasing in `x`.
pub fn moran_residual(ratios: &[f64], x: f64) -> f64 {
    ratios.iter().map(|a| a.powf(x)).sum::<f64>() - 1.0
}

/// Root of the Moran equation `Σ a_i^x = 1` by bracketing and bisection.
///
/// The bracket starts at `[0, 2]` and its upper end doubles while `g` is still
/// positive there; bisection stops once the bracket is at most `tol` wide and
/// the midpoint is returned. A single ratio gives 0.
pub fn hausdorff_dimension(ratios: &[f64], tol: f64) -> Result<f64> {
    check_ratios(ratios)?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::invalid(format!("tolerance {tol} must be positive")));
    }
    let g = |x| moran_residual(ratios, x);
    if g(0.0) <= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0f64;
    let mut hi = 2.0f64;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Overflow("Moran bracket diverged".into()));
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mendès France dimension of the resolvable expanded curve (expansion by the
/// reciprocal of the smallest ratio): `log(Σ a_i / a_min) / log(1 / a_min)`.
pub fn mf_dimension_resolvable(ratios: &[f64]) -> Result<f64> {
    check_ratios(ratios)?;
    let a1 = min_of(ratios);
    let sum: f64 = ratios.iter().sum();
    Ok((sum / a1).ln() / (1.0 / a1).ln())
}

/// Whether expansion by `1/a_i` (1-based `i`) gives the resolvable curve, i.e.
/// `a_i` equals the smallest ratio up to [`RATIO_MERGE_TOL`].
pub fn is_resolvable(rule: &GeneratorRule, i: usize) -> Result<bool> {
    let a = crate::curvegen::ratio_at(rule, i)?;
    let min = rule.min_ratio();
    Ok(a - min <= RATIO_MERGE_TOL * min)
}

/// Lower bound `1 + log(Σ a_j) / log(1/√(a_1 a_2))` on the Mendès France
/// dimension of every non-resolvable expanded curve, `a_1 < a_2` being the two
/// smallest ratios.
pub fn theorem2_lower_bound(ratios: &[f64]) -> Result<f64> {
    check_ratios(ratios)?;
    if ratios.len() < 2 {
        return Err(Error::NotApplicable(
            "bound requires at least two ratios".into(),
        ));
    }
    let distinct = crate::model::distinct_values(ratios);
    if distinct[0].1 > 1 || distinct.len() < 2 {
        return Err(Error::NotApplicable(
            "bound requires two distinct smallest ratios".into(),
        ));
    }
    let (a1, a2) = (distinct[0].0, distinct[1].0);
    let sum: f64 = ratios.iter().sum();
    Ok(1.0 + sum.ln() / (1.0 / (a1 * a2).sqrt()).ln())
}

/// `(f(x), g(x))` with `f(x) = Σ a_i a_min^{x−1} − 1` and `g(x) = Σ a_i^x − 1`.
///
/// `f` vanishes at the resolvable dimension and `g` at the Hausdorff dimension.
pub fn moran_gap(ratios: &[f64], x: f64) -> Result<(f64, f64)> {
    check_ratios(ratios)?;
    let a1 = min_of(ratios);
    let scale = a1.powf(x - 1.0);
    let f = ratios.iter().map(|a| a * scale).sum::<f64>() - 1.0;
    Ok((f, moran_residual(ratios, x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn resolvable_index() {
        let koch = crate::model::parse_rule(crate::rules::KOCH).unwrap();
        for i in 1..=4 {
            assert!(is_resolvable(&koch, i).unwrap());
        }
        let mixed = crate::model::parse_rule(crate::rules::MIXED_345).unwrap();
        assert_eq!(
            (1..=3)
                .map(|i| is_resolvable(&mixed, i).unwrap())
                .collect::<Vec<_>>(),
            vec![true, false, false]
        );
        assert!(is_resolvable(&mixed, 4).is_err());
    }

    const D_H_345: f64 = 1.204_609_927_153_997;
    const EQ1_345: f64 = 1.151_433_284_986_89;
    const BOUND_345: f64 = 1.171_980_089_909_680_7;

    #[test]
    fn moran_examples() {
        let koch = hausdorff_dimension(&[1.0 / 3.0; 4], MORAN_TOL).unwrap();
        assert!((koch - 4f64.ln() / 3f64.ln()).abs() < 1e-11);
        assert_eq!(hausdorff_dimension(&[0.5], MORAN_TOL).unwrap(), 0.0);
        let d = hausdorff_dimension(&[0.3, 0.4, 0.5], MORAN_TOL).unwrap();
        assert!((d - D_H_345).abs() < 1e-11, "{d}");
    }

    #[test]
    fn bracket_grows_for_large_sums() {
        let ratios = vec![0.9; 50];
        let d = hausdorff_dimension(&ratios, MORAN_TOL).unwrap();
        assert!((d - 50f64.ln() / (1.0 / 0.9f64).ln()).abs() < 1e-9, "{d}");
    }

    #[test]
    fn resolvable_examples() {
        let d = mf_dimension_resolvable(&[0.5, 0.5, 0.5]).unwrap();
        assert!((d - 3f64.ln() / 2f64.ln()).abs() < 1e-15);
        assert_eq!(mf_dimension_resolvable(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(mf_dimension_resolvable(&[0.25, 0.75]).unwrap(), 1.0);
        let d = mf_dimension_resolvable(&[0.3, 0.4, 0.5]).unwrap();
        assert!((d - EQ1_345).abs() < 1e-14);
    }

    #[test]
    fn bound_examples() {
        let b = theorem2_lower_bound(&[0.3, 0.4, 0.5]).unwrap();
        assert!((b - BOUND_345).abs() < 1e-14);
        assert!(b > mf_dimension_resolvable(&[0.3, 0.4, 0.5]).unwrap());
        assert!((b - EQ1_345 - 0.020_546_804_922_790_7).abs() < 1e-12);
        assert_eq!(theorem2_lower_bound(&[0.25, 0.75]).unwrap(), 1.0);
        assert!(matches!(
            theorem2_lower_bound(&[0.3, 0.3, 0.5]),
            Err(Error::NotApplicable(_))
        ));
        assert!(matches!(
            theorem2_lower_bound(&[0.3]),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn gap_examples() {
        let r = [0.3, 0.4, 0.5];
        let (f, _) = moran_gap(&r, EQ1_345).unwrap();
        assert!(f.abs() < 1e-12);
        let dh = hausdorff_dimension(&r, MORAN_TOL).unwrap();
        let (f, g) = moran_gap(&r, dh).unwrap();
        assert!(g.abs() < 1e-11);
        assert!(f < 0.0);
        let (f, g) = moran_gap(&r, 1.0).unwrap();
        assert!((f - 0.2).abs() < 1e-15 && (g - 0.2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_ratios() {
        assert!(hausdorff_dimension(&[], MORAN_TOL).is_err());
        assert!(hausdorff_dimension(&[1.0], MORAN_TOL).is_err());
        assert!(hausdorff_dimension(&[0.5], 0.0).is_err());
        assert!(mf_dimension_resolvable(&[0.0, 0.5]).is_err());
    }

    fn ratio_lists() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.1f64..0.9, 2..8).prop_filter("sum in [1, 3]", |v| {
            let s: f64 = v.iter().sum();
            (1.0..=3.0).contains(&s)
        })
    }

    proptest! {
        #[test]
        fn root_brackets_sign_change(r in ratio_lists()) {
            let d = hausdorff_dimension(&r, MORAN_TOL).unwrap();
            prop_assert!(moran_residual(&r, d - MORAN_TOL) > 0.0);
            prop_assert!(moran_residual(&r, d + MORAN_TOL) < 0.0);
        }

        #[test]
        fn closed_form_zeroes_f(r in ratio_lists()) {
            let d = mf_dimension_resolvable(&r).unwrap();
            prop_assert!(moran_gap(&r, d).unwrap().0.abs() < 1e-12);
        }

        #[test]
        fn resolvable_below_hausdorff(r in ratio_lists()) {
            let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assume!(r.iter().any(|&a| a > lo * (1.0 + 1e-6)));
            let d = mf_dimension_resolvable(&r).unwrap();
            let dh = hausdorff_dimension(&r, MORAN_TOL).unwrap();
            prop_assert!(d < dh, "{} !< {}", d, dh);
        }

        #[test]
        fn equal_ratios_collapse(n in 2usize..9, m in 2u32..6) {
            prop_assume!((n as u32) >= m);
            let a = 1.0 / m as f64;
            let r = vec![a; n];
            let expected = (n as f64).ln() / (m as f64).ln();
            prop_assert!((mf_dimension_resolvable(&r).unwrap() - expected).abs() < 1e-12);
            prop_assert!((hausdorff_dimension(&r, MORAN_TOL).unwrap() - expected).abs() < 1e-11);
        }
    }
}
