use lie3_core::expr::{is_zero, q_frac, Bindings, Expr, Value, ValueBindings};
use proptest::prelude::*;

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::sym("x")),
        Just(Expr::sym("y")),
        Just(Expr::sym("a")),
        (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Expr::frac(n, d)),
    ]
}

fn affine() -> impl Strategy<Value = Expr> {
    (-3i64..=3, -3i64..=3, 1i64..=3).prop_map(|(k, c, d)| Expr::frac(k, d) * Expr::sym("x") + Expr::frac(c, d))
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), 0i64..=3).prop_map(|(a, n)| a.pow(n)),
            (inner.clone(), affine()).prop_map(|(a, t)| a * Expr::exp(&t)),
            (inner.clone(), affine()).prop_map(|(a, t)| a * Expr::sin(&t)),
            (inner, affine()).prop_map(|(a, t)| a * Expr::cos(&t)),
        ]
    })
}

fn point(x: f64, y: f64, a: f64) -> ValueBindings {
    ValueBindings::new()
        .with("x", Value::Float(x))
        .with("y", Value::Float(y))
        .with("a", Value::Float(a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normal_form_is_idempotent(e in tree()) {
        let s = e.simplify();
        prop_assert_eq!(s.simplify(), s.clone());
        prop_assert_eq!(lie3_core::parse(&e.render()).unwrap(), e);
    }

    #[test]
    fn diff_is_linear(e1 in tree(), e2 in tree(), an in -9i64..=9, bn in -9i64..=9, d in 1i64..=5) {
        let (al, be) = (Expr::frac(an, d), Expr::frac(bn, d + 1));
        let lhs = (&al * &e1 + &be * &e2).diff("x");
        let rhs = al * e1.diff("x") + be * e2.diff("x");
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn diff_matches_central_difference(e in tree(), xn in -20i64..=20, yn in -9i64..=9) {
        let (x, y, a) = (xn as f64 / 10.0, yn as f64 / 3.0, 0.7);
        let h = 1e-6;
        let f = |x: f64| e.evaluate(&point(x, y, a)).unwrap().to_f64();
        let fd = (f(x + h) - f(x - h)) / (2.0 * h);
        let d = e.diff("x").evaluate(&point(x, y, a)).unwrap().to_f64();
        prop_assume!(d.is_finite() && fd.is_finite() && d.abs() < 1e4);
        prop_assert!((d - fd).abs() <= 1e-5 * (1.0 + d.abs()), "{} vs {}", d, fd);
    }

    #[test]
    fn substitution_commutes_with_chain_rule(g in tree()) {
        let f = Expr::func("f", vec![Expr::sym("s")]);
        let b = Bindings::new().with("s", g.clone());
        let lhs = f.subst(&b).diff("x");
        let fp = Expr::func_deriv("f", vec![Expr::sym("s")], vec![1]);
        let rhs = fp.subst(&b) * g.diff("x");
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn zero_test_is_sound(e in tree(), seed in 0u64..1000) {
        if is_zero(&e, seed).unwrap_or(false) {
            for (xn, yn) in [(3i64, 5i64), (-7, 2), (11, -4)] {
                let b = ValueBindings::new()
                    .with_q("x", q_frac(xn, 4))
                    .with_q("y", q_frac(yn, 3))
                    .with_q("a", q_frac(5, 7));
                let v = e.evaluate(&b).unwrap().to_f64();
                prop_assert!(v.abs() <= 1e-6, "reported zero but evaluates to {}", v);
            }
        }
    }

    #[test]
    fn difference_of_equal_trees_is_zero(e in tree()) {
        let d = &e - &e.simplify();
        prop_assert!(is_zero(&d, 1).unwrap());
    }
}
