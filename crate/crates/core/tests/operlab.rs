use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;

use swapping_core::operlab::{convergence_order, integrate, FundamentalSolution, HolonomyClass, OperSpec};
use swapping_core::swapalg::coeff;
use swapping_core::Error;

const M: usize = 4096;

fn hill() -> FundamentalSolution {
    integrate(&OperSpec::hill_constant(PI * PI), M).unwrap()
}

fn pullback() -> FundamentalSolution {
    integrate(&OperSpec::hill_pullback(&[(1, 0.3), (2, -0.15)], 48).unwrap(), M).unwrap()
}

fn pullback3() -> FundamentalSolution {
    let o = OperSpec::hill_pullback(&[(1, -0.25), (3, 0.1)], 48).unwrap();
    integrate(&o.symmetric_square().unwrap(), M).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// `sin pi(a - b)`: the n=2 pairing of the Veronese curve `[cos pi t : sin pi t]`.
fn s(a: f64, b: f64) -> f64 {
    (PI * (a - b)).sin()
}

#[test]
fn holonomy_and_determinant() {
    let h = hill();
    assert!((h.holonomy() + DMatrix::<f64>::identity(2, 2)).norm() < 1e-8);
    assert!(h.determinant_drift() < 1e-8);
    assert_eq!(h.holonomy_class().to_string(), "trivial-in-PSL");
    let u = integrate(&OperSpec::hill_constant(0.0), M).unwrap();
    assert_eq!(u.holonomy_class(), HolonomyClass::Unipotent);
    // Solutions 1 and t: holonomy [[1,1],[0,1]] in the companion frame.
    assert!((u.holonomy() - DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0])).norm() < 1e-10);
    let p = integrate(&OperSpec::hill_constant(4.0 * PI * PI), M).unwrap();
    assert!((p.holonomy() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-8);
    for sol in [pullback(), pullback3(), integrate(&OperSpec::veronese(4).unwrap(), M).unwrap()] {
        assert!(sol.determinant_drift() < 1e-8);
        assert!(sol.is_trivial(), "defect {}", sol.holonomy_defect());
    }
    assert!(matches!(integrate(&OperSpec::hill_constant(1.0), 63), Err(Error::InvalidInput(_))));
}

#[test]
fn weak_cross_ratio_closed_form() {
    let h = hill();
    for [x, y, z, t] in [[0.1, 0.35, 0.6, 0.8], [0.05, 0.9, 0.42, 0.2], [0.7, 0.1, 0.3, 0.55]] {
        let expected = s(x, y) * s(z, t) / (s(z, y) * s(x, t));
        assert!(close(h.weak_cross_ratio(x, y, z, t).unwrap(), expected, 1e-7));
    }
    assert!(close(h.weak_cross_ratio(0.1, 0.3, 0.1, 0.7).unwrap(), 1.0, 1e-12));
    assert!(close(h.weak_cross_ratio(0.1, 0.3, 0.6, 0.3).unwrap(), 1.0, 1e-12));
}

#[test]
fn weak_cross_ratio_cocycles() {
    // b(x,y,z,t) = [x;z;y;t] in cross-fraction notation.
    for sol in [pullback(), pullback3()] {
        let b = |x, y, z, t| sol.weak_cross_ratio(x, y, z, t).unwrap();
        let (x, y, z, t, s) = (0.05, 0.31, 0.52, 0.77, 0.9);
        assert!(close(b(x, y, z, t), b(x, y, z, s) * b(x, s, z, t), 1e-8));
        assert!(close(b(x, y, z, t), b(x, y, s, t) * b(s, y, z, t), 1e-8));
    }
}

#[test]
fn multivalued_opers_are_rejected() {
    let e = integrate(&OperSpec::hill_constant(2.0), M).unwrap();
    assert_eq!(e.weak_cross_ratio(0.1, 0.2, 0.3, 0.4), Err(Error::Multivalued));
    assert_eq!(e.oper_cross_fraction(0.1, 0.2, 0.3, 0.4), Err(Error::Multivalued));
}

#[test]
fn coordinate_function_constancy() {
    for sol in [pullback(), pullback3()] {
        let (yy, y) = (0.2, 0.65);
        let f0 = sol.coordinate_function(yy, y).unwrap();
        for k in 0..16 {
            let t = -0.4 + 0.11 * k as f64;
            assert!(close(sol.coordinate_function_at(yy, y, t).unwrap(), f0, 1e-8), "t={}", t);
        }
    }
}

#[test]
fn coordinate_function_depends_on_projections() {
    // Holonomy +I: integer shifts leave F unchanged. Holonomy -I: they flip its sign.
    let p = pullback3();
    let f = p.coordinate_function(0.2, 0.65).unwrap();
    assert!(close(p.coordinate_function(1.2, 0.65).unwrap(), f, 1e-8));
    assert!(close(p.coordinate_function(0.2, -0.35).unwrap(), f, 1e-8));
    let h = hill();
    let g = h.coordinate_function(0.2, 0.65).unwrap();
    assert!(close(h.coordinate_function(1.2, 0.65).unwrap(), -g, 1e-8));
}

#[test]
fn coordinate_function_sine_pattern() {
    let h = hill();
    let ratio = |yy: f64, y: f64| h.coordinate_function(yy, y).unwrap() / s(y, yy);
    let r0 = ratio(0.1, 0.4);
    for (yy, y) in [(0.3, 0.85), (0.6, 0.15)] {
        assert!(close(ratio(yy, y), r0, 1e-8));
    }
}

#[test]
fn oper_cross_fraction_agrees() {
    for sol in [hill(), pullback(), pullback3()] {
        let (xx, x, yy, y) = (0.12, 0.47, 0.33, 0.81);
        let f = sol.oper_cross_fraction(xx, x, yy, y).unwrap();
        assert!(close(f, sol.weak_cross_ratio(xx, y, yy, x).unwrap(), 1e-6));
        assert!(close(sol.oper_cross_fraction(xx, x, yy, x).unwrap(), 1.0, 1e-12));
        assert!(close(sol.oper_cross_fraction(xx + 1.0, x - 2.0, yy, y + 1.0).unwrap(), f, 1e-8));
    }
}

#[test]
fn ds_pair_bracket_examples() {
    let h = hill();
    let f = |a, b| h.coordinate_function(a, b).unwrap();
    // Unlinked chords (0.1, 0.2) and (0.5, 0.6).
    assert_eq!(h.ds_pair_bracket((0.1, 0.2), (0.5, 0.6)).unwrap(), 0.0);
    // Linked chords (0.1, 0.5) and (0.3, 0.7).
    let (xx, x, yy, y) = (0.1, 0.5, 0.3, 0.7);
    let v = h.ds_pair_bracket((xx, x), (yy, y)).unwrap();
    let inner = f(xx, y) * f(yy, x) - 0.25 * f(xx, x) * f(yy, y);
    assert!(close(v.abs(), inner.abs(), 1e-10) && v != 0.0);
    let w = h.ds_pair_bracket((yy, y), (xx, x)).unwrap();
    assert!((v + w).abs() < 1e-10);
    assert!(matches!(h.ds_pair_bracket((0.1, 0.5), (0.1, 0.7)), Err(Error::Hypothesis(_))));
}

#[test]
fn ds_crossfraction_examples() {
    let sol = pullback3();
    let alpha = coeff(0, 1);
    let q0 = [0.05, 0.35, 0.6, 0.85];
    let q1 = [0.2, 0.45, 0.7, 0.95];
    let (ds, sw) = sol.ds_crossfraction_bracket(q0, q1, &alpha).unwrap();
    assert!((ds - sw).abs() < 1e-5 * sw.abs().max(1.0));
    let (ds, sw) = sol.ds_crossfraction_bracket(q0, q0, &alpha).unwrap();
    assert!(ds.abs() < 1e-12 && sw.abs() < 1e-12);
    // Shared endpoints between the two quadruples.
    let (ds, sw) = sol.ds_crossfraction_bracket(q0, [0.05, 0.45, 0.6, 0.95], &alpha).unwrap();
    assert!(sw != 0.0 && (ds - sw).abs() < 1e-5 * sw.abs().max(1.0), "{} {}", ds, sw);
    // Each cross fraction lives in its own arc.
    let (ds, sw) = sol.ds_crossfraction_bracket([0.02, 0.06, 0.1, 0.14], [0.5, 0.55, 0.6, 0.65], &alpha).unwrap();
    assert_eq!((ds, sw), (0.0, 0.0));
}

#[test]
fn frenet_examples() {
    let sol = integrate(&OperSpec::veronese(3).unwrap(), M).unwrap();
    let tuples = vec![
        vec![(0.1, 1), (0.4, 1), (0.7, 1)],
        vec![(0.2, 2), (0.6, 1)],
        vec![(0.3, 1), (0.35, 1)],
        vec![(0.5, 3)],
    ];
    let r = sol.frenet_validate(&tuples).unwrap();
    assert!(r.min_normalised > 1e-3, "{:?}", r);
    // Single support of weight n: the wedge is the frame determinant, here 1.
    assert!((r.raw[3] - 1.0).abs() < 1e-8);
    assert!(matches!(sol.frenet_validate(&[vec![(0.2, 1), (1.2, 1)]]), Err(Error::InvalidInput(_))));
    assert!(matches!(sol.frenet_validate(&[vec![(0.2, 4)]]), Err(Error::InvalidInput(_))));
    let f = sol.frenet_sample(0.3).unwrap();
    assert!(f.xi_star.dot(&f.xi).abs() < 1e-10);
}

#[test]
fn rk4_order() {
    for n in [2, 3] {
        let o = OperSpec::veronese(n).unwrap();
        let order = convergence_order(&o, [0.1, 0.37, 0.58, 0.83], 64).unwrap();
        assert!(order >= 3.5, "n={} order={}", n, order);
    }
}

#[test]
fn oper_files_round_trip() {
    let o = OperSpec::parse("n = 3 # order\nq2: k=0 cos=39.47841760435743 sin=0\nq3: k=1 cos=0.5 sin=-0.25\n").unwrap();
    assert_eq!(o.order(), 3);
    assert!((o.q(3, 0.0) - 0.5).abs() < 1e-15);
    assert_eq!(OperSpec::parse(&o.to_string()).unwrap(), o);
    assert!(matches!(OperSpec::parse("n = 2\nq2: k=0 cos=x sin=0"), Err(Error::Syntax { line: 2, .. })));
    assert!(OperSpec::parse("n = 1").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classical_oracle_on_pullbacks(a1 in -0.3f64..0.3, a2 in -0.2f64..0.2, v in proptest::collection::vec(0.0f64..1.0, 4)) {
        let amps = [(1u32, a1), (2, a2)];
        let sol = integrate(&OperSpec::hill_pullback(&amps, 48).unwrap(), M).unwrap();
        prop_assume!(sol.is_trivial());
        let mut sorted = v.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assume!(sorted.windows(2).all(|w| w[1] - w[0] > 0.03) && sorted[3] - sorted[0] < 0.97);
        let [x, y, z, t] = [v[0], v[1], v[2], v[3]];
        let phi = |u: f64| OperSpec::pullback_phi(&amps, u);
        let expected = s(phi(x), phi(y)) * s(phi(z), phi(t)) / (s(phi(z), phi(y)) * s(phi(x), phi(t)));
        prop_assert!(close(sol.weak_cross_ratio(x, y, z, t).unwrap(), expected, 1e-7));
    }
}
