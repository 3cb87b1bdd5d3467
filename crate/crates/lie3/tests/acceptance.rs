//! Acceptance battery. Prints one PASS/FAIL line per criterion, then fails
//! the test if any criterion failed.

use std::time::{Duration, Instant};

use lie3::cli::run;
use lie3_core::canonical::{
    build_canonical, commutant_condition_exact, is_degenerate, trivial_generators, LinearSystem,
};
use lie3_core::classify::{draw_params, mutation_draw};
use lie3_core::equivalence::{check_reparam, pushforward, transform_system, EquivalenceTransform};
use lie3_core::expr::{q, ZeroTest, Q};
use lie3_core::families::{
    linearize_family, verify_family, xi_nonzero_family, xi_zero_family, JordanParams, Subcase, XiZeroData,
};
use lie3_core::jordan::{jordanize, JordanError, JordanKind, Matrix3};
use lie3_core::linalg::{rank, RatMatrix3};
use lie3_core::symmetry::{check_admitted, determining_residual, PointGenerator};
use lie3_core::{parse, Expr};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

// 1. Theorem reproduction through the CLI.
fn theorem() -> Outcome {
    let t = Instant::now();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(["lie3", "theorem", "--seed", "42", "--draws", "100"], &mut out, &mut err);
    let took = t.elapsed();
    let doc: Value = serde_json::from_slice(&out).unwrap_or(Value::Null);
    let symbolic: u64 = doc["cases"].as_array().map_or(0, |cs| cs.iter().map(|c| c["symbolic"].as_u64().unwrap_or(0)).sum());
    let checks = doc["checks"].as_u64().unwrap_or(0);
    let pass = code == 0 && checks == 400 && symbolic == 400 && took < Duration::from_secs(60);
    outcome(pass, format!("{symbolic}/{checks} admission checks exact-symbolic, exit {code}, {}", secs(took)))
}

/// Symbolic Jordan parameters with the entries a subcase sets to zero.
fn zero_data(sub: Subcase) -> XiZeroData {
    let mut d = XiZeroData::opaque_shift(JordanParams::symbolic(sub.kind()));
    for part in sub.label().split(',').filter(|p| !p.contains("!=")) {
        match part.trim_end_matches("=0") {
            "a" => d.params.a = Expr::zero(),
            "b" => d.params.b = Expr::zero(),
            "d" => d.params.d = Expr::zero(),
            "h1" => d.h[0] = Expr::zero(),
            "h2" => d.h[1] = Expr::zero(),
            "h3" => d.h[2] = Expr::zero(),
            _ => {}
        }
    }
    d
}

const KINDS: [JordanKind; 4] = [JordanKind::J1, JordanKind::J2, JordanKind::J3, JordanKind::J4];

// 2. Every solution family, with symbolic parameters and opaque shifts.
fn families() -> Outcome {
    let t = Instant::now();
    let mut fams = Vec::new();
    for k in KINDS {
        fams.push(xi_nonzero_family(&JordanParams::symbolic(k)).unwrap());
    }
    for s in Subcase::ALL {
        fams.push(xi_zero_family(&zero_data(s), s).unwrap());
    }
    let mut bad = Vec::new();
    for f in &fams {
        let r = verify_family(f, 2).unwrap();
        if !r.tests.iter().all(|t| *t == ZeroTest::Symbolic) {
            bad.push(f.label());
        }
    }
    let took = t.elapsed();
    let per: Vec<String> = KINDS
        .iter()
        .map(|k| format!("{}:{}", k.name(), Subcase::ALL.iter().filter(|s| s.kind() == *k).count()))
        .collect();
    outcome(
        bad.is_empty() && took < Duration::from_secs(120),
        format!(
            "{} of {} families exact (4 with xi != 0; xi = 0 subcases {}), {}{}",
            fams.len() - bad.len(),
            fams.len(),
            per.join(" "),
            secs(took),
            if bad.is_empty() { String::new() } else { format!("; failing {bad:?}") }
        ),
    )
}

// 3. Linearized families against the canonical constructor.
fn linearization() -> Outcome {
    let mut entries = 0;
    let mut bad = Vec::new();
    for k in KINDS {
        let fam = xi_nonzero_family(&JordanParams::symbolic(k)).unwrap();
        let lin = linearize_family(&fam).unwrap();
        let (canon, _) = build_canonical(&lin.params).unwrap();
        let got = lin.normalized();
        for i in 0..3 {
            for j in 0..3 {
                entries += 1;
                if !(&got.c[i][j] - &canon.c[i][j]).simplify().is_zero() {
                    bad.push(format!("{} ({i},{j})", k.name()));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{}/{entries} entries identical in normal form {bad:?}", entries - bad.len()))
}

type IM = [[i64; 3]; 3];

/// Kind from the exact characteristic polynomial and exact ranks.
fn oracle_kind(m: &IM) -> JordanKind {
    let a = m.map(|r| r.map(i128::from));
    let tr = a[0][0] + a[1][1] + a[2][2];
    let minors = a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] + a[1][1] * a[2][2]
        - a[1][2] * a[2][1];
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    let (b, c, d) = (-tr, minors, -det);
    let disc = 18 * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * c * c * c - 27 * d * d;
    if disc > 0 {
        return JordanKind::J1;
    }
    if disc < 0 {
        return JordanKind::J2;
    }
    let shifted_rank = |num: i128, den: i128| {
        let rows: Vec<Vec<Q>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| {
                        let v = Q::new((a[i][j] * den).into(), den.into());
                        if i == j { v - Q::new(num.into(), den.into()) } else { v }
                    })
                    .collect()
            })
            .collect();
        rank(&rows)
    };
    if b * b == 3 * c {
        // Triple root -b/3.
        return match shifted_rank(-b, 3) {
            0 => JordanKind::J1,
            1 => JordanKind::J3,
            _ => JordanKind::J4,
        };
    }
    // Double root (9d - bc) / (2(b^2 - 3c)).
    match shifted_rank(9 * d - b * c, 2 * (b * b - 3 * c)) {
        1 => JordanKind::J1,
        _ => JordanKind::J3,
    }
}

// 4. Jordan reconstruction on the integer corpus.
fn jordan() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut ok, mut ill, mut wrong_kind, mut worst) = (0, 0, 0, 0.0f64);
    for _ in 0..1000 {
        let m: IM = core::array::from_fn(|_| core::array::from_fn(|_| rng.gen_range(-5..=5)));
        let a = Matrix3::from_ints(m);
        match jordanize(&a, None) {
            Ok(j) => {
                let rel = j.residual(&a) / (1.0 + a.max_abs());
                worst = worst.max(rel);
                if j.kind == oracle_kind(&m) {
                    ok += 1;
                } else {
                    wrong_kind += 1;
                }
            }
            Err(JordanError::IllConditioned(_)) => ill += 1,
            Err(e) => panic!("{e}"),
        }
    }
    outcome(
        worst <= 1e-8 && wrong_kind == 0 && ill < 10,
        format!("max residual/(1+|A|) {worst:.1e}, kind agrees {ok}/{}, ill-conditioned {ill}/1000", ok + wrong_kind),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Kind {
    Linear,
    Shift,
    Reparam,
}

fn random_transform(kind: Kind, rng: &mut ChaCha8Rng) -> EquivalenceTransform {
    match kind {
        Kind::Linear => loop {
            let m = RatMatrix3::from_ints(core::array::from_fn(|_| core::array::from_fn(|_| rng.gen_range(-2..=2))));
            if !m.det().is_zero() {
                return EquivalenceTransform::linear(m).unwrap();
            }
        },
        Kind::Shift => EquivalenceTransform::shift(core::array::from_fn(|_| {
            let (a, b, c) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            parse(&format!("{a}*x^2 + {b}*x + {c}")).unwrap()
        })),
        Kind::Reparam => {
            let (k, m, e) = (rng.gen_range(1..=3), rng.gen_range(-2..=2), rng.gen_range(0..=2));
            let (phi, psi) = match rng.gen_range(0..3) {
                0 => (format!("{k}*x + {m}"), "1".to_string()),
                1 => (format!("-{k}/(x + {e}) + {m}"), format!("1/(x + {e})")),
                _ => (format!("{k}*ln(x + {e}) + {m}"), format!("exp(-1/2*ln(x + {e}))")),
            };
            let (phi, psi) = (parse(&phi).unwrap(), parse(&psi).unwrap());
            assert!(check_reparam(&phi, &psi));
            EquivalenceTransform::reparam(phi, psi).unwrap()
        }
    }
}

// 5. Admission survives every equivalence transformation.
fn equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let kinds = [Kind::Linear, Kind::Shift, Kind::Reparam];
    let mut counts = [0usize; 4];
    let mut failed = Vec::new();
    for i in 0..200 {
        let slot = i % 4;
        let chain: Vec<Kind> = if slot < 3 {
            vec![kinds[slot]]
        } else {
            (0..rng.gen_range(2..=3)).map(|_| kinds[rng.gen_range(0..3)]).collect()
        };
        let case = (i / 4 % 4 + 1) as u8;
        let p = draw_params(case, &mut rng).unwrap();
        let (l, g) = build_canonical(&p).unwrap();
        let (mut s, mut g) = (l.to_system(), g);
        for k in &chain {
            let t = random_transform(*k, &mut rng);
            s = transform_system(&t, &s).unwrap();
            g = pushforward(&t, &g).unwrap();
        }
        counts[slot] += 1;
        if !check_admitted(&g, &s, i as u64).unwrap().admitted {
            failed.push((i, case, chain));
        }
    }
    outcome(
        failed.is_empty() && counts.iter().all(|c| *c >= 50),
        format!(
            "{}/200 admitted after transform (linear {}, shift {}, reparam {}, compositions {}){}",
            200 - failed.len(),
            counts[0],
            counts[1],
            counts[2],
            counts[3],
            if failed.is_empty() { String::new() } else { format!("; failing {failed:?}") }
        ),
    )
}

// 6. Trivial generators of random polynomial systems.
fn trivial() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut good = 0;
    for _ in 0..50 {
        let c = core::array::from_fn(|_| {
            core::array::from_fn(|_| {
                let k: [i64; 3] = core::array::from_fn(|_| rng.gen_range(-3..=3));
                let sym = if rng.gen_bool(0.3) { " + k*x" } else { "" };
                parse(&format!("{} + {}*x + {}/2*x^2{sym}", k[0], k[1], k[2])).unwrap()
            })
        });
        let l = LinearSystem::new(c).unwrap();
        let t = trivial_generators(&l);
        let r = determining_residual(&t.template, &l.to_system());
        let exact = (0..3).all(|i| (&r[i] - &t.constraints[i]).simplify().is_zero());
        let scaling = check_admitted(&t.scaling, &l.to_system(), 6).unwrap();
        if exact && scaling.admitted && scaling.symbolic() {
            good += 1;
        }
    }
    outcome(good == 50, format!("{good}/50 systems: template residual exact and scaling admitted"))
}

fn int_matrix(rng: &mut ChaCha8Rng, r: i64) -> RatMatrix3 {
    RatMatrix3::from_ints(core::array::from_fn(|_| core::array::from_fn(|_| rng.gen_range(-r..=r))))
}

fn add(a: &RatMatrix3, b: &RatMatrix3) -> RatMatrix3 {
    RatMatrix3(core::array::from_fn(|i| core::array::from_fn(|j| &a.0[i][j] + &b.0[i][j])))
}

fn scaled(a: &RatMatrix3, k: i64) -> RatMatrix3 {
    RatMatrix3(a.0.clone().map(|r| r.map(|v| v * q(k))))
}

fn linear_gen(a: &RatMatrix3) -> PointGenerator {
    PointGenerator::linear(&a.0.clone().map(|r| r.map(Expr::rational)))
}

/// The walk-through for `A = diag(a, b, d)`: each step of the argument
/// on the commutator `[A, C]_ij = (a_i - a_j) c_ij`.
fn j1_walkthrough() -> bool {
    let c = |i: usize, j: usize| Expr::sym(&format!("c{i}{j}"));
    let sym = LinearSystem::new(core::array::from_fn(|i| core::array::from_fn(|j| c(i + 1, j + 1)))).unwrap();
    let d = [Expr::sym("a"), Expr::sym("b"), Expr::sym("d")];
    let comm: Vec<Expr> = (0..9).map(|k| (&d[k / 3] - &d[k % 3]) * &sym.c[k / 3][k % 3]).collect();
    let structural = comm[1] == (&d[0] - &d[1]) * c(1, 2) && comm[3] == (&d[1] - &d[0]) * c(2, 1);
    // a = 1 != b = 2: c12 and c21 must vanish.
    let c_full = RatMatrix3::from_ints([[1, 2, 3], [4, 5, 6], [7, 8, 9]]);
    let step1 = !commutant_condition_exact(&RatMatrix3::from_ints([[1, 0, 0], [0, 2, 0], [0, 0, 3]]), &LinearSystem::from_rational(&c_full))[0][1].is_zero();
    // c12 = c21 = 0 but c13 != 0 with d != a still fails on (1,3).
    let c_two = RatMatrix3::from_ints([[1, 0, 3], [0, 5, 6], [7, 8, 9]]);
    let a_diff = RatMatrix3::from_ints([[1, 0, 0], [0, 2, 0], [0, 0, 3]]);
    let step2 = !commutant_condition_exact(&a_diff, &LinearSystem::from_rational(&c_two))[0][2].is_zero();
    // With d = a the (2,3), (3,2) entries force c23 = c32 = 0.
    let a_eq = RatMatrix3::from_ints([[1, 0, 0], [0, 2, 0], [0, 0, 1]]);
    let step3 = !commutant_condition_exact(&a_eq, &LinearSystem::from_rational(&c_two))[1][2].is_zero();
    let c_end = LinearSystem::from_rational(&RatMatrix3::from_ints([[1, 0, 3], [0, 5, 0], [7, 0, 9]]));
    let commutes = commutant_condition_exact(&a_eq, &c_end).iter().flatten().all(Expr::is_zero);
    let admitted = check_admitted(&linear_gen(&a_eq), &c_end.to_system(), 7).unwrap().admitted;
    structural && step1 && step2 && step3 && commutes && admitted && is_degenerate(&c_end).is_some()
}

// 7. Commutant condition against the admission test.
fn commutant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut agree, mut commuting) = (0, 0);
    for i in 0..200 {
        let c = int_matrix(&mut rng, 3);
        let a = if i % 2 == 0 {
            let id = RatMatrix3::identity();
            add(&add(&scaled(&id, rng.gen_range(-2..=2)), &scaled(&c, rng.gen_range(-2..=2))), &scaled(&c.mul(&c), rng.gen_range(-1..=1)))
        } else {
            int_matrix(&mut rng, 2)
        };
        let l = LinearSystem::from_rational(&c);
        let zero = commutant_condition_exact(&a, &l).iter().flatten().all(Expr::is_zero);
        let adm = check_admitted(&linear_gen(&a), &l.to_system(), i).unwrap().admitted;
        commuting += zero as usize;
        agree += (zero == adm) as usize;
    }
    let walk = j1_walkthrough();
    outcome(
        agree == 200 && walk,
        format!("{agree}/200 pairs agree ({commuting} commuting); J1 walk-through {}", if walk { "reproduced" } else { "FAILED" }),
    )
}

// 8. Mutated generators are rejected.
fn negative_controls() -> Outcome {
    let mut rejected = 0;
    let mut exceptions = Vec::new();
    for i in 0..100u64 {
        let m = mutation_draw(8, (i % 4 + 1) as u8, i).unwrap();
        if m.rejected {
            rejected += 1;
        } else {
            exceptions.push(format!("#{i} case {} {:?}: {:?}", m.case, m.mutation, m.generator));
        }
    }
    for e in &exceptions {
        println!("    admitted mutation {e}");
    }
    outcome(rejected >= 99, format!("{rejected}/100 mutations rejected, {} logged exceptions", exceptions.len()))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 theorem reproduction", theorem),
        ("2 solution families", families),
        ("3 linearization", linearization),
        ("4 jordan reconstruction", jordan),
        ("5 equivalence covariance", equivalence),
        ("6 trivial generators", trivial),
        ("7 commutant equivalence", commutant),
        ("8 negative controls", negative_controls),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        let o = f();
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
