use std::f64::consts::TAU;

use mfdim::combin::{census_enumerate, multinomial_census};
use mfdim::curvegen::{contract_iterate, contract_iterate_labeled, expand_iterate, Polyline};
use mfdim::dims::{hausdorff_dimension, mf_dimension_resolvable, MORAN_TOL};
use mfdim::geom::{convex_hull, diameter, hull_of_points, sausage_area};
use mfdim::{parse_rule, validate_rule, Budget, GeneratorRule, Point};
use proptest::prelude::*;

const TOL: f64 = 0.01;

fn rule_strategy(max_n: usize) -> impl Strategy<Value = GeneratorRule> {
    (2usize..=max_n)
        .prop_flat_map(|n| {
            (
                proptest::collection::vec((0.0f64..1.0, -0.35f64..0.35), n - 1),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
        .prop_filter_map("ratios outside (0, 1)", |(mut interior, flags)| {
            interior.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut vertices = vec![Point::ORIGIN];
            vertices.extend(interior.into_iter().map(|(x, y)| Point::new(x, y)));
            vertices.push(Point::new(1.0, 0.0));
            GeneratorRule::new(vertices, flags).ok()
        })
}

fn polyline_strategy() -> impl Strategy<Value = Polyline> {
    proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2..10).prop_filter_map(
        "degenerate",
        |v| {
            let mut pts: Vec<Point> = v.into_iter().map(|(x, y)| Point::new(x, y)).collect();
            pts.dedup();
            Polyline::new(pts).ok()
        },
    )
}

fn area(p: &Polyline, eps: f64) -> f64 {
    sausage_area(p, eps, TOL, &Budget::default()).unwrap().area
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rule_documents_round_trip(rule in rule_strategy(6)) {
        let text = rule.to_document();
        prop_assert_eq!(parse_rule(&text).unwrap(), rule);
    }

    #[test]
    fn endpoints_and_scaling_identities(rule in rule_strategy(5), k in 0u32..5) {
        let budget = Budget::default();
        let p = contract_iterate(&rule, k, &budget).unwrap();
        prop_assert_eq!(p.first(), Point::ORIGIN);
        prop_assert_eq!(p.last(), Point::new(1.0, 0.0));
        prop_assert_eq!(p.segment_count(), rule.segment_count().pow(k));
        let expected_total = rule.ratio_sum().powi(k as i32);
        prop_assert!(rel(p.length_stats().total, expected_total) < 1e-9);
        for i in 1..=rule.segment_count() {
            let q = expand_iterate(&rule, i, k, &budget).unwrap();
            let factor = (1.0 / rule.ratios()[i - 1]).powi(k as i32);
            prop_assert!(rel(q.length_stats().total, factor * p.length_stats().total) < 1e-9);
            prop_assert!(rel(diameter(&q), factor * diameter(&p)) < 1e-9);
            prop_assert_eq!(q.first(), Point::ORIGIN);
        }
    }

    #[test]
    fn segment_spectrum_matches_census(rule in rule_strategy(4), k in 0u32..5) {
        let labeled = contract_iterate_labeled(&rule, k, &Budget::default()).unwrap();
        let census = multinomial_census(rule.segment_count(), k, &Budget::default()).unwrap();
        let mut expected: Vec<f64> = Vec::new();
        for (config, count) in &census.entries {
            let len: f64 = config.iter().zip(rule.ratios()).map(|(&e, a)| a.powi(e as i32)).product();
            let count: u64 = count.try_into().unwrap();
            expected.extend(std::iter::repeat_n(len, count as usize));
        }
        let mut got: Vec<f64> = labeled.polyline.segments().map(|(a, b)| a.dist(b)).collect();
        got.sort_by(f64::total_cmp);
        expected.sort_by(f64::total_cmp);
        prop_assert_eq!(got.len(), expected.len());
        for (g, e) in got.iter().zip(&expected) {
            prop_assert!(rel(*g, *e) < 1e-9, "{} vs {}", g, e);
        }
        prop_assert_eq!(census_enumerate(&rule, k).unwrap(), census);
    }

    #[test]
    fn self_intersection_persists_with_depth(rule in rule_strategy(4)) {
        let budget = Budget::default();
        let mut failed = false;
        for depth in 1..=4 {
            let ok = validate_rule(&rule, depth, &budget).unwrap().ok;
            prop_assert!(!(failed && ok), "depth {} passes after a failure", depth);
            failed |= !ok;
        }
    }

    #[test]
    fn resolvable_dimension_below_hausdorff(rule in rule_strategy(6)) {
        let d = mf_dimension_resolvable(rule.ratios()).unwrap();
        let d_h = hausdorff_dimension(rule.ratios(), MORAN_TOL).unwrap();
        prop_assert!(d <= d_h + 1e-9);
        prop_assert!(d >= 1.0 - 1e-12);
    }

    #[test]
    fn sausage_area_is_rigid_motion_invariant(
        p in polyline_strategy(),
        eps in 0.1f64..1.0,
        shift in (-50.0f64..50.0, -50.0f64..50.0),
        angle in 0.0f64..TAU,
    ) {
        let base = area(&p, eps);
        let moved = p.translated(Point::new(shift.0, shift.1)).unwrap().rotated(angle).unwrap();
        prop_assert!(rel(base, area(&moved, eps)) <= 2.0 * TOL);
    }

    #[test]
    fn hull_is_invariant_under_motion_and_order(
        p in polyline_strategy(),
        shift in (-50.0f64..50.0, -50.0f64..50.0),
        angle in 0.0f64..TAU,
    ) {
        let h = convex_hull(&p).unwrap();
        let moved = p.translated(Point::new(shift.0, shift.1)).unwrap().rotated(angle).unwrap();
        prop_assert!(rel(h.perimeter, convex_hull(&moved).unwrap().perimeter) < 1e-9);
        prop_assert_eq!(convex_hull(&p.reversed()).unwrap().perimeter, h.perimeter);
        let mut shuffled = p.vertices().to_vec();
        let half = shuffled.len() / 2;
        shuffled.rotate_left(half);
        prop_assert!(rel(hull_of_points(&shuffled).unwrap().perimeter, h.perimeter) < 1e-12);
    }

    #[test]
    fn sausage_area_bounded_by_capsules_and_hull(p in polyline_strategy(), eps in 0.05f64..1.0) {
        let a = area(&p, eps);
        let capsules: f64 = p.segments().map(|(s, t)| mfdim::geom::capsule_area(s.dist(t), eps)).sum();
        prop_assert!(a <= capsules * (1.0 + TOL));
        let r = 0.5 * eps;
        let h = convex_hull(&p).unwrap();
        // the ε/2-neighbourhood of the hull contains the sausage
        prop_assert!(a <= (h.area + h.perimeter * r + std::f64::consts::PI * r * r) * (1.0 + TOL));
    }
}

#[test]
fn koch_hull_perimeter_grows_like_three_to_the_k() {
    let koch = parse_rule(mfdim::rules::KOCH).unwrap();
    let ratios: Vec<f64> = (1..=7)
        .map(|k| {
            let p = expand_iterate(&koch, 1, k, &Budget::default()).unwrap();
            convex_hull(&p).unwrap().perimeter / 3f64.powi(k as i32)
        })
        .collect();
    let lo = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let hi = ratios.iter().cloned().fold(f64::MIN, f64::max);
    assert!(lo > 1.0 && hi < 4.0, "{ratios:?}");
    assert!(hi / lo < 1.01, "{ratios:?}");
}
