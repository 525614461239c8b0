use num_rational::Rational64;
use proptest::prelude::*;

use swapping_core::linking::{
    cocycle_defect, default_cut, linking_number, linking_number_with_cut, linking_positions, six_point_f,
    six_point_g, CirclePoint, PointConfig,
};
use swapping_core::Error;

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn pt(label: &str, n: i64) -> CirclePoint {
    CirclePoint::at(label, n, 10)
}

#[test]
fn reference_values() {
    assert_eq!(linking_positions(r(1, 10), r(3, 10), r(2, 10), r(4, 10)), r(1, 1));
    // X = x kills every factor.
    assert_eq!(linking_positions(r(1, 10), r(1, 10), r(2, 10), r(4, 10)), r(0, 1));
    // [Xx,Yx] with X, Y, x cyclically ordered.
    assert_eq!(linking_positions(r(1, 10), r(3, 10), r(2, 10), r(3, 10)), r(1, 2));
}

#[test]
fn positions_are_reduced_mod_one() {
    assert_eq!(CirclePoint::at("p", 13, 10).position, r(3, 10));
    assert_eq!(CirclePoint::at("p", -1, 10).position, r(9, 10));
    assert_eq!(
        linking_positions(r(11, 10), r(-7, 10), r(12, 10), r(4, 10)),
        linking_positions(r(1, 10), r(3, 10), r(2, 10), r(4, 10))
    );
}

#[test]
fn cut_on_an_argument_is_rejected() {
    let (a, b, c, d) = (pt("X", 1), pt("x", 3), pt("Y", 2), pt("y", 4));
    assert!(matches!(linking_number_with_cut(&a, &b, &c, &d, r(3, 10)), Err(Error::InvalidCut(_))));
    assert_eq!(linking_number_with_cut(&a, &b, &c, &d, r(5, 20)).unwrap(), r(1, 1));
    let cfg = PointConfig::new([("X", r(1, 10)), ("x", r(3, 10))]).unwrap();
    assert!(matches!(cfg.with_cut(r(13, 10)), Err(Error::InvalidCut(_))));
}

#[test]
fn default_cut_avoids_arguments() {
    let pos = [r(1, 10), r(3, 10), r(2, 10), r(4, 10)];
    let c = default_cut(&pos);
    assert!(!pos.contains(&c));
    // Largest gap is from 0.4 around to 0.1.
    assert_eq!(c, r(3, 4));
}

#[test]
fn degenerate_six_point_value() {
    let (xx, x, yy, zz) = (pt("X", 1), pt("x", 2), pt("Y", 3), pt("Z", 4));
    assert_eq!(six_point_f(&xx, &x, &yy, &x, &zz, &x), r(1, 4));
}

#[test]
fn six_point_examples() {
    let p: Vec<CirclePoint> = [1, 5, 2, 7, 3, 9].iter().map(|&n| pt("p", n)).collect();
    assert_eq!(six_point_f(&p[0], &p[1], &p[2], &p[3], &p[4], &p[5]), r(0, 1));
    assert_eq!(six_point_g(&p[0], &p[1], &p[2], &p[3], &p[4], &p[5]), r(0, 1));
    assert_eq!(six_point_f(&p[0], &p[0], &p[2], &p[3], &p[4], &p[5]), r(0, 1));
    assert_eq!(six_point_g(&p[0], &p[0], &p[2], &p[3], &p[4], &p[5]), r(0, 1));
}

#[test]
fn config_aliases_and_errors() {
    let cfg = PointConfig::parse("# aliases share a point\nX = 1/10\nx = 3/10\nx2 = 13/10\n").unwrap();
    assert_eq!(cfg.len(), 2);
    assert_eq!(cfg.id("x").unwrap(), cfg.id("x2").unwrap());
    assert!(matches!(cfg.id("q"), Err(Error::UnknownLabel(_))));
    assert!(matches!(PointConfig::parse("X = 1/10\nX = 2/10"), Err(Error::DuplicateLabel(_))));
    assert!(matches!(PointConfig::parse("X = 1/10\nY 2/10"), Err(Error::Syntax { line: 2, .. })));
    assert!(matches!(PointConfig::parse("X = 1/0"), Err(Error::Syntax { line: 1, .. })));
}

fn grid() -> impl Strategy<Value = CirclePoint> {
    (0i64..24).prop_map(|n| CirclePoint::at("p", n, 24))
}

proptest! {
    #[test]
    fn antisymmetry(a in grid(), b in grid(), c in grid(), d in grid()) {
        let l = linking_number(&a, &b, &c, &d);
        prop_assert_eq!(l, -linking_number(&c, &d, &a, &b));
        prop_assert_eq!(l, -linking_number(&a, &b, &d, &c));
        prop_assert!([-2, -1, 0, 1, 2].iter().any(|&k| l == r(k, 2)));
    }

    #[test]
    fn cocycle(z in grid(), y in grid(), a in grid(), b in grid(), c in grid()) {
        prop_assert_eq!(cocycle_defect(&z, &y, &a, &b, &c), r(0, 1));
    }

    #[test]
    fn alternative(v in proptest::sample::subsequence((0i64..24).collect::<Vec<_>>(), 4).prop_shuffle()) {
        let p: Vec<CirclePoint> = v.iter().map(|&n| CirclePoint::at("p", n, 24)).collect();
        prop_assert_eq!(linking_number(&p[0], &p[1], &p[2], &p[3]) * linking_number(&p[0], &p[3], &p[2], &p[1]), r(0, 1));
    }

    #[test]
    fn cut_independence(a in grid(), b in grid(), c in grid(), d in grid(), cut in 0i64..24) {
        let cut = r(2 * cut + 1, 48);
        prop_assert_eq!(linking_number_with_cut(&a, &b, &c, &d, cut).unwrap(), linking_number(&a, &b, &c, &d));
    }

    #[test]
    fn four_point_relation(x in grid(), y in grid(), xx in grid(), yy in grid(), zz in grid(), z in grid()) {
        let l = linking_number;
        prop_assert_eq!(l(&x, &y, &zz, &z) + l(&yy, &xx, &zz, &z), l(&x, &xx, &zz, &z) + l(&yy, &y, &zz, &z));
    }

    #[test]
    fn f_equals_minus_swapped_g(p in proptest::collection::vec(grid(), 6)) {
        prop_assert_eq!(
            six_point_f(&p[0], &p[1], &p[2], &p[3], &p[4], &p[5]),
            -six_point_g(&p[2], &p[3], &p[0], &p[1], &p[4], &p[5])
        );
    }

    #[test]
    fn f_vanishes_without_triple_point(p in proptest::collection::vec(grid(), 6)) {
        let common = [&p[0], &p[1]].iter().any(|a| {
            [&p[2], &p[3]].iter().any(|b| a.position == b.position)
                && [&p[4], &p[5]].iter().any(|c| a.position == c.position)
        });
        if !common {
            prop_assert_eq!(six_point_f(&p[0], &p[1], &p[2], &p[3], &p[4], &p[5]), r(0, 1));
            prop_assert_eq!(six_point_g(&p[0], &p[1], &p[2], &p[3], &p[4], &p[5]), r(0, 1));
        }
    }
}
