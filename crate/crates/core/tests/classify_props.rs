use lie3_core::canonical::{build_canonical, is_degenerate};
use lie3_core::classify::{classify_by_matrix, draw_params, fit_canonical, ClassifyError, Verdict};
use lie3_core::jordan::{JordanError, Matrix3};
use lie3_core::symmetry::check_admitted;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M = [[i64; 3]; 3];

fn mul(a: &M, b: &M) -> M {
    core::array::from_fn(|i| core::array::from_fn(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()))
}

fn float(m: &M) -> Matrix3 {
    Matrix3(m.map(|r| r.map(|v| v as f64)))
}

/// Unimodular `Q` and its inverse from elementary row moves.
fn unimodular(rng: &mut ChaCha8Rng) -> (M, M) {
    let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let (mut q, mut qi) = (id, id);
    for _ in 0..3 {
        let i = rng.gen_range(0..3);
        let j = (i + rng.gen_range(1..3)) % 3;
        let k = rng.gen_range(-2..=2);
        let (mut e, mut ei) = (id, id);
        e[i][j] = k;
        ei[i][j] = -k;
        q = mul(&e, &q);
        qi = mul(&qi, &ei);
    }
    (q, qi)
}

#[test]
fn round_trip_integer_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut checked = 0;
    for _ in 0..300 {
        let m: M = core::array::from_fn(|_| core::array::from_fn(|_| rng.gen_range(-5..=5)));
        let tc = match classify_by_matrix(&float(&m)) {
            Ok(tc) => tc,
            Err(ClassifyError::Jordan(JordanError::IllConditioned(_))) => continue,
            Err(e) => panic!("{e} for {m:?}"),
        };
        assert_eq!(tc.case, tc.jordan.kind.index());
        let (sys, gen) = build_canonical(&tc.params).unwrap();
        assert_eq!(gen, tc.generator);
        let adm = check_admitted(&gen, &sys.to_system(), 3).unwrap();
        assert!(adm.admitted && adm.symbolic(), "{m:?}");
        checked += 1;
    }
    assert!(checked > 290);
}

#[test]
fn case_is_conjugation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..200 {
        let m: M = core::array::from_fn(|_| core::array::from_fn(|_| rng.gen_range(-4..=4)));
        let (q, qi) = unimodular(&mut rng);
        let conj = mul(&mul(&q, &m), &qi);
        if let (Ok(a), Ok(b)) = (classify_by_matrix(&float(&m)), classify_by_matrix(&float(&conj))) {
            assert_eq!(a.case, b.case, "{m:?} vs {conj:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn fit_recovers_parameters(case in 1u8..=4, seed in any::<u64>()) {
        let p = draw_params(case, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let (l, _) = build_canonical(&p).unwrap();
        prop_assume!(is_degenerate(&l).is_none());
        let r = fit_canonical(&l).unwrap();
        prop_assert_eq!(&r.verdict, &Verdict::CanonicalCase(case), "{:?}", r.notes);
        prop_assert_eq!(r.params.unwrap(), p);
        prop_assert!(r.witnesses[0].symbolic);
    }
}
