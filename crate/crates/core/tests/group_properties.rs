use num_rational::Ratio;
use proptest::prelude::*;

use nilperc::group::{builtin_spec, Builtin};
use nilperc::haar::rescaled_embedding_error;
use nilperc::{AlgebraVector, Group, LatticePoint, Structure};

type Q = Ratio<i128>;

fn group(b: Builtin) -> Group {
    Group::new(builtin_spec(&b).unwrap()).unwrap()
}

fn lp(v: &[i64]) -> LatticePoint {
    LatticePoint(v.to_vec())
}

/// `log` of the unitriangular matrix `[[1, a, c], [0, 1, b], [0, 0, 1]]` in
/// the basis `E12, E23, E13`: `N - N^2 / 2` with `N^2 = ab E13`.
fn matrix_log(a: i64, b: i64, c: i64) -> [Q; 3] {
    let q = |x: i64| Q::from_integer(x as i128);
    [q(a), q(b), q(c) - q(a) * q(b) / q(2)]
}

fn builtins() -> Vec<Builtin> {
    vec![Builtin::Zd(1), Builtin::Zd(3), Builtin::Heisenberg3, Builtin::Filiform4]
}

fn point(dim: usize, bound: i64) -> impl Strategy<Value = LatticePoint> {
    prop::collection::vec(-bound..=bound, dim).prop_map(LatticePoint)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_axioms_hold_on_every_builtin(idx in 0usize..4, seed in any::<[i64; 12]>()) {
        let g = group(builtins()[idx].clone());
        let d = g.dim();
        // Filiform4 grows cubically in the first coordinate; keep products in range
        let bound = if idx == 3 { 1000 } else { 1_000_000 };
        let pick = |k: usize| LatticePoint((0..d).map(|i| seed[(k * 4 + i) % 12].rem_euclid(2 * bound + 1) - bound).collect());
        let (x, y, z) = (pick(0), pick(1), pick(2));
        let e = g.identity();
        prop_assert_eq!(g.multiply(&g.multiply(&x, &y).unwrap(), &z).unwrap(), g.multiply(&x, &g.multiply(&y, &z).unwrap()).unwrap());
        prop_assert_eq!(g.multiply(&x, &e).unwrap(), x.clone());
        prop_assert_eq!(g.multiply(&e, &x).unwrap(), x.clone());
        let xi = g.inverse(&x).unwrap();
        prop_assert_eq!(g.multiply(&x, &xi).unwrap(), e.clone());
        prop_assert_eq!(g.multiply(&xi, &x).unwrap(), e);
        // (xy)^{-1} = y^{-1} x^{-1}
        prop_assert_eq!(
            g.inverse(&g.multiply(&x, &y).unwrap()).unwrap(),
            g.multiply(&g.inverse(&y).unwrap(), &xi).unwrap()
        );
    }

    #[test]
    fn heisenberg_matches_matrix_log(x in point(3, 50)) {
        let g = group(Builtin::Heisenberg3);
        let v = g.to_exponential(&x).unwrap();
        prop_assert_eq!(v.0, matrix_log(x.0[0], x.0[1], x.0[2]).to_vec());
    }

    #[test]
    fn exponential_and_second_kind_are_inverse(idx in 0usize..4, x in point(4, 10)) {
        let g = group(builtins()[idx].clone());
        let x = LatticePoint(x.0[..g.dim()].to_vec());
        for s in [Structure::Original, Structure::Graded] {
            let q: Vec<Q> = x.0.iter().map(|&c| Q::from_integer(c as i128)).collect();
            let v = g.to_exponential_q(s, &q).unwrap();
            prop_assert_eq!(g.to_second_kind(&v, s).unwrap(), q);
        }
    }

    #[test]
    fn central_elements_commute_under_both_products(c in -1000i64..1000, x in point(3, 1000)) {
        let g = group(Builtin::Heisenberg3);
        let z = AlgebraVector::from_ints(&[0, 0, c]);
        let xv = AlgebraVector::from_ints(&x.0);
        prop_assert!(g.commutes(Structure::Original, &z, &xv).unwrap());
        prop_assert!(g.commutes(Structure::Graded, &z, &xv).unwrap());
    }

    #[test]
    fn products_agree_when_left_factor_is_on_an_axis(t in -1000i64..1000, axis in 0usize..2, y in point(3, 1000)) {
        let g = group(Builtin::Heisenberg3);
        let mut a = [0i64; 3];
        a[axis] = t;
        let x = AlgebraVector::from_ints(&a);
        let yv = AlgebraVector::from_ints(&y.0);
        prop_assert_eq!(g.bch_multiply(Structure::Original, &x, &yv).unwrap(), g.graded_multiply(&x, &yv).unwrap());
    }

    #[test]
    fn dilation_is_a_graded_homomorphism(idx in 0usize..4, lam in 0.1f64..10.0, a in prop::collection::vec(-5.0f64..5.0, 4), b in prop::collection::vec(-5.0f64..5.0, 4)) {
        let g = group(builtins()[idx].clone());
        let d = g.dim();
        let (a, b) = (&a[..d], &b[..d]);
        let lhs = g.dilate(lam, &g.graded_multiply_f64(a, b).unwrap()).unwrap();
        let rhs = g.graded_multiply_f64(&g.dilate(lam, a).unwrap(), &g.dilate(lam, b).unwrap()).unwrap();
        for (l, r) in lhs.iter().zip(&rhs) {
            prop_assert!((l - r).abs() <= 1e-12 * (1.0 + l.abs().max(r.abs())), "{} vs {}", l, r);
        }
    }

    #[test]
    fn dilations_compose(x in prop::collection::vec(-100i64..100, 3)) {
        let g = group(Builtin::Heisenberg3);
        let v: Vec<f64> = x.iter().map(|&c| c as f64).collect();
        let back = g.dilate(1.0 / 7.0, &g.dilate(7.0, &v).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&v) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn worked_examples() {
    let h = group(Builtin::Heisenberg3);
    assert_eq!(h.multiply(&lp(&[1, 0, 0]), &lp(&[0, 1, 0])).unwrap(), lp(&[1, 1, 1]));
    assert_eq!(h.inverse(&lp(&[1, 1, 1])).unwrap(), lp(&[-1, -1, 0]));
    assert_eq!(h.to_exponential(&lp(&[1, 1, 0])).unwrap().0, matrix_log(1, 1, 0).to_vec());
    let prod = h.graded_multiply(&AlgebraVector::from_ints(&[1, 0, 0]), &AlgebraVector::from_ints(&[0, 1, 0])).unwrap();
    assert_eq!(prod.0, vec![Q::from_integer(1), Q::from_integer(1), Q::new(1, 2)]);
    assert_eq!(h.dilate(2.0, &[1.0, 1.0, 1.0]).unwrap(), vec![2.0, 2.0, 4.0]);
    let z2 = group(Builtin::Zd(2));
    assert_eq!(z2.multiply(&lp(&[3, -1]), &lp(&[1, 4])).unwrap(), lp(&[4, 3]));
    assert_eq!(z2.inverse(&lp(&[3, -1])).unwrap(), lp(&[-3, 1]));
}

#[test]
fn dilation_is_not_an_original_homomorphism() {
    // Filiform4 carries lower-order BCH terms, so delta_2 fails for the
    // original product there; Heisenberg3's original product is already graded
    let g = group(Builtin::Filiform4);
    let (a, b) = ([1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]);
    let lhs = g.dilate(2.0, &g.bch_multiply_f64(Structure::Original, &a, &b).unwrap()).unwrap();
    let rhs = g
        .bch_multiply_f64(Structure::Original, &g.dilate(2.0, &a).unwrap(), &g.dilate(2.0, &b).unwrap())
        .unwrap();
    assert!(lhs.iter().zip(&rhs).any(|(l, r)| (l - r).abs() > 1e-6));
}

#[test]
fn bch_tables_respect_weighted_degrees() {
    for b in builtins() {
        let spec = builtin_spec(&b).unwrap();
        for t in &spec.bch_main {
            let (da, db) = (spec.weighted_degree(&t.alpha), spec.weighted_degree(&t.beta));
            assert!(da >= 1 && db >= 1);
            assert_eq!(da + db, spec.weights[t.coord]);
        }
        for t in &spec.bch_lower {
            let (da, db) = (spec.weighted_degree(&t.alpha), spec.weighted_degree(&t.beta));
            assert!(da >= 1 && db >= 1);
            assert!(da + db < spec.weights[t.coord]);
        }
    }
}

#[test]
fn rescaled_embedding_converges() {
    // the Heisenberg products agree exactly, so its error is rounding only; the decay
    // shows on Filiform4
    let h = group(Builtin::Heisenberg3);
    assert!(rescaled_embedding_error(&h, 10.0, &[1.0, 1.0, 0.0]).unwrap() < 1e-12);
    let f = group(Builtin::Filiform4);
    let x = [1.0, 1.0, 0.0, 0.0];
    let e10 = rescaled_embedding_error(&f, 10.0, &x).unwrap();
    let e100 = rescaled_embedding_error(&f, 100.0, &x).unwrap();
    assert!(e10 > 0.0 && e10 >= 5.0 * e100, "{e10} vs {e100}");
    let z = group(Builtin::Zd(2));
    assert!(rescaled_embedding_error(&z, 10.0, &[3.0, 4.0]).unwrap() < 1e-12);
}
