use lie3_core::canonical::{build_canonical, param_names, CanonicalParams, LinearSystem};
use lie3_core::equivalence::{pushforward, transform_system, EquivalenceTransform};
use lie3_core::expr::{q, zero_test, Q};
use lie3_core::linalg::RatMatrix3;
use lie3_core::symmetry::{check_admitted, PointGenerator, SecondOrderSystem};
use lie3_core::{parse, Expr};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = RatMatrix3> {
    prop::array::uniform3(prop::array::uniform3(-3i64..=3))
        .prop_map(RatMatrix3::from_ints)
        .prop_filter("nonsingular", |m| m.det() != q(0))
}

fn canonical() -> impl Strategy<Value = CanonicalParams> {
    (1u8..=4, prop::collection::vec(-3i64..=3, 10)).prop_map(|(case, raw)| {
        let names = param_names(case).unwrap();
        let mut vals: Vec<Q> = raw[..names.len()].iter().map(|v| q(*v)).collect();
        for (i, n) in names.iter().enumerate() {
            match (case, *n) {
                (2, "c") | (4, "gamma") if vals[i] == q(0) => vals[i] = q(1),
                (4, "alpha") => vals[i] = q(0),
                _ => {}
            }
        }
        CanonicalParams::rational(case, &vals).unwrap()
    })
}

/// Moebius maps that are regular on the working domain.
fn moebius() -> impl Strategy<Value = (Expr, Expr)> {
    prop_oneof![
        (1i64..=3, -2i64..=2).prop_map(|(a, b)| (parse(&format!("{a}*x + {b}")).unwrap(), Expr::one())),
        (0i64..=2).prop_map(|e| {
            let inv = parse(&format!("1/(x + {e})")).unwrap();
            (-inv.clone(), inv)
        }),
    ]
}

fn transform() -> impl Strategy<Value = EquivalenceTransform> {
    prop_oneof![
        matrix().prop_map(|m| EquivalenceTransform::linear(m).unwrap()),
        prop::array::uniform3((-2i64..=2, -2i64..=2)).prop_map(|c| {
            EquivalenceTransform::shift(c.map(|(a, b)| parse(&format!("{a}*x^2 + {b}*x")).unwrap()))
        }),
        moebius().prop_map(|(phi, psi)| EquivalenceTransform::reparam(phi, psi).unwrap()),
    ]
}

fn same_system(a: &SecondOrderSystem, b: &SecondOrderSystem) -> bool {
    (0..3).all(|i| zero_test(&(&a.rhs[i] - &b.rhs[i]), 5).unwrap().is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covariance(t in transform(), p in canonical()) {
        let (sys, gen) = build_canonical(&p).unwrap();
        let s = sys.to_system();
        prop_assert!(check_admitted(&gen, &s, 1).unwrap().admitted);
        let s2 = transform_system(&t, &s).unwrap();
        let g2 = pushforward(&t, &gen).unwrap();
        let adm = check_admitted(&g2, &s2, 2).unwrap();
        prop_assert!(adm.admitted, "{:?}", adm.residuals);
    }

    #[test]
    fn linear_composition(p1 in matrix(), p2 in matrix(), p in canonical()) {
        let s = build_canonical(&p).unwrap().0.to_system();
        let t1 = EquivalenceTransform::linear(p1.clone()).unwrap();
        let t2 = EquivalenceTransform::linear(p2.clone()).unwrap();
        let t21 = EquivalenceTransform::linear(p2.mul(&p1)).unwrap();
        let lhs = transform_system(&t2, &transform_system(&t1, &s).unwrap()).unwrap();
        let rhs = transform_system(&t21, &s).unwrap();
        prop_assert!(same_system(&lhs, &rhs));
    }

    #[test]
    fn linear_inverse(p1 in matrix(), p in canonical()) {
        let s = build_canonical(&p).unwrap().0.to_system();
        let t = EquivalenceTransform::linear(p1.clone()).unwrap();
        let ti = EquivalenceTransform::linear(p1.inverse().unwrap()).unwrap();
        let back = transform_system(&ti, &transform_system(&t, &s).unwrap()).unwrap();
        for i in 0..3 {
            prop_assert_eq!((&back.rhs[i] - &s.rhs[i]).simplify(), Expr::zero());
        }
    }

    #[test]
    fn linear_change_conjugates(p1 in matrix(), c in prop::array::uniform3(prop::array::uniform3(-3i64..=3))) {
        let cm = RatMatrix3::from_ints(c);
        let l = LinearSystem::from_rational(&cm);
        let t = EquivalenceTransform::linear(p1.clone()).unwrap();
        let got = transform_system(&t, &l.to_system()).unwrap();
        let want = LinearSystem::from_rational(&p1.mul(&cm).mul(&p1.inverse().unwrap())).to_system();
        prop_assert!(same_system(&got, &want));
        let g = pushforward(&t, &PointGenerator::linear(&l.c)).unwrap();
        let gw = PointGenerator::linear(&LinearSystem::from_rational(&p1.mul(&cm).mul(&p1.inverse().unwrap())).c);
        prop_assert_eq!(g, gw);
    }

    #[test]
    fn moebius_keeps_free_particle((phi, psi) in moebius()) {
        let t = EquivalenceTransform::reparam(phi, psi).unwrap();
        let s = transform_system(&t, &SecondOrderSystem::free_particle()).unwrap();
        prop_assert!(s.rhs.iter().all(|e| zero_test(e, 4).unwrap().is_zero()));
    }
}

#[test]
fn identity_reparam_keeps_generators() {
    let t = EquivalenceTransform::reparam(parse("x").unwrap(), Expr::one()).unwrap();
    let g = PointGenerator::new(parse("x^2").unwrap(), [parse("x*y").unwrap(), parse("z").unwrap(), Expr::zero()]).unwrap();
    assert_eq!(pushforward(&t, &g).unwrap(), g);
}

#[test]
fn identity_linear_change_keeps_systems() {
    let s = SecondOrderSystem::new([parse("x*y*z").unwrap(), parse("u^2").unwrap(), parse("y").unwrap()]).unwrap();
    assert_eq!(transform_system(&EquivalenceTransform::identity(), &s).unwrap(), s);
}

#[test]
fn unpushed_generator_is_rejected() {
    let p = CanonicalParams::rational(3, &[1, 2, 0, -1, 1, 0, 1, 2, 1, 1].map(q)).unwrap();
    let (sys, gen) = build_canonical(&p).unwrap();
    let t = EquivalenceTransform::reparam(parse("-1/(x + 1)").unwrap(), parse("1/(x + 1)").unwrap()).unwrap();
    let s2 = transform_system(&t, &sys.to_system()).unwrap();
    assert!(!check_admitted(&gen, &s2, 3).unwrap().admitted);
    assert!(check_admitted(&pushforward(&t, &gen).unwrap(), &s2, 3).unwrap().admitted);
}
