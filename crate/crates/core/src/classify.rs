//! Matching linear systems `y'' = C(x) y` to the four canonical forms.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::{
    build_canonical, is_degenerate, param_names, CanonicalError, CanonicalParams, DegeneracyClass, LinearSystem,
};
use crate::expr::{q, q_frac, Atom, Value, ValueBindings, ZeroTest, ZeroTestError, Q};
use crate::jordan::{jordanize, JordanError, JordanForm, Matrix3};
use crate::linalg::{null_space, solve};
use crate::symmetry::{check_admitted, PointGenerator, DEP, DEP1};
use crate::Expr;

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Jordan(#[from] JordanError),
    #[error(transparent)]
    Canonical(#[from] CanonicalError),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
    #[error("coefficient entry outside the x^n exp(mu x) sin/cos(nu x) class: {0}")]
    UnsupportedAtoms(String),
}

const SEED: u64 = 0xc1a5;

/// Closest rational with a small denominator, or the exact binary value.
pub fn snap(v: f64) -> Q {
    let tol = 1e-9 * (1.0 + v.abs());
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = v;
    for _ in 0..20 {
        let a = libm::floor(r);
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let (h2, k2) = (a.saturating_mul(h1).saturating_add(h0), a.saturating_mul(k1).saturating_add(k0));
        if k2 > 10_000 {
            break;
        }
        if (h2 as f64 / k2 as f64 - v).abs() <= tol {
            return q_frac(h2, k2);
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let f = r - a as f64;
        if f == 0.0 {
            break;
        }
        r = 1.0 / f;
    }
    Q::from_float(v).unwrap_or_else(Q::zero)
}

/// Canonical case reached from a constant matrix through its Jordan type.
#[derive(Clone, Debug)]
pub struct TheoremCase {
    pub case: u8,
    pub jordan: JordanForm,
    /// Generator parameters are numeric; the remaining coefficients are left
    /// as free symbols.
    pub params: CanonicalParams,
    pub generator: PointGenerator,
}

/// Parameters of the canonical generator for a real Jordan form.
pub fn generator_params(j: &JordanForm) -> Vec<(&'static str, Q)> {
    let (a, b, c, d) = (snap(j.a), snap(j.b), snap(j.c), snap(j.d));
    match j.kind.index() {
        1 => vec![("alpha", &a - &b), ("beta", &a - &d)],
        2 => vec![("alpha", &a - &b), ("c", c)],
        3 => vec![("alpha", &a - &b)],
        _ => vec![("alpha", q(0))],
    }
}

/// Canonical parameters with the given numeric entries and every other
/// entry a symbol named `prefix` + name.
fn template_params(case: u8, fixed: &[(&str, Q)], prefix: &str) -> Result<CanonicalParams, CanonicalError> {
    let names = param_names(case).ok_or(CanonicalError::UnknownCase(case))?;
    let vals = names
        .iter()
        .map(|n| match fixed.iter().find(|(f, _)| f == n) {
            Some((_, v)) => Expr::rational(v.clone()),
            None => Expr::sym(&format!("{prefix}{n}")),
        })
        .collect();
    CanonicalParams::new(case, vals)
}

pub fn classify_by_matrix(a: &Matrix3) -> Result<TheoremCase, ClassifyError> {
    let jordan = jordanize(a, None)?;
    let case = jordan.kind.index();
    let params = template_params(case, &generator_params(&jordan), "")?;
    let (_, generator) = build_canonical(&params)?;
    Ok(TheoremCase { case, jordan, params, generator })
}

/// Rows `M` and right side `b` with `M u = b` equivalent to every
/// expression vanishing identically, when the expressions are affine in the
/// unknown symbols with rational coefficients.
fn coefficient_rows(eqs: &[Expr], unknowns: &[String]) -> Option<(Vec<Vec<Q>>, Vec<Q>)> {
    let mut groups: BTreeMap<(usize, Vec<(Atom, i32)>), (Vec<Q>, Q)> = BTreeMap::new();
    let n = unknowns.len();
    for (eq, e) in eqs.iter().enumerate() {
        for t in e.simplify().terms() {
            let mut slot = None;
            let mut rest = Vec::new();
            for (a, k) in t.mono.factors() {
                let idx = match a {
                    Atom::Sym(s) => unknowns.iter().position(|u| u.as_str() == &**s),
                    _ => None,
                };
                match idx {
                    Some(i) if *k == 1 && slot.is_none() => slot = Some(i),
                    Some(_) => return None,
                    None => rest.push((a.clone(), *k)),
                }
            }
            if rest.iter().any(|(a, _)| !x_only(a)) {
                return None;
            }
            let g = groups.entry((eq, rest)).or_insert_with(|| (vec![Q::zero(); n], Q::zero()));
            match slot {
                Some(i) => g.0[i] += &t.coeff,
                None => g.1 -= &t.coeff,
            }
        }
    }
    Some(groups.into_values().unzip())
}

fn x_only(a: &Atom) -> bool {
    match a {
        Atom::Sym(s) => &**s == "x",
        other => other.arg().map_or(false, |e| e.free_symbols().iter().all(|s| &**s == "x")),
    }
}

/// Rate `mu` of an argument `mu x`.
fn linear_rate(e: &Expr) -> Option<Q> {
    match e.poly_coeffs("x")?.as_slice() {
        [z, m] if z.is_zero() => Some(m.clone()),
        _ => None,
    }
}

/// Entries must be sums of `x^n exp(mu x) sin/cos(nu x)` with rational data.
fn check_atoms(l: &LinearSystem) -> Result<(), ClassifyError> {
    for row in &l.c {
        for e in row {
            for t in e.terms() {
                for (a, k) in t.mono.factors() {
                    let ok = match a {
                        Atom::Sym(s) => &**s == "x" && *k > 0,
                        Atom::Exp(arg) | Atom::Sin(arg) | Atom::Cos(arg) => *k > 0 && linear_rate(arg).is_some(),
                        _ => false,
                    };
                    if !ok {
                        return Err(ClassifyError::UnsupportedAtoms(e.to_string()));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Common exponential rate of every term of a nonzero entry.
fn exp_rate(e: &Expr) -> Option<Q> {
    let mut rate = None;
    for t in e.terms() {
        let r = t
            .mono
            .factors()
            .iter()
            .find_map(|(a, _)| match a {
                Atom::Exp(arg) => linear_rate(arg),
                _ => None,
            })
            .unwrap_or_else(Q::zero);
        match &rate {
            None => rate = Some(r),
            Some(p) if *p == r => {}
            Some(_) => return None,
        }
    }
    rate
}

/// Frequency of the first trigonometric atom of an entry.
fn trig_rate(e: &Expr) -> Option<Q> {
    e.terms().iter().find_map(|t| {
        t.mono.factors().iter().find_map(|(a, _)| match a {
            Atom::Sin(arg) | Atom::Cos(arg) => linear_rate(arg),
            _ => None,
        })
    })
}

fn solve_rows(rows: &[Vec<Q>], rhs: &[Q], n: usize) -> Option<Vec<Q>> {
    if rows.is_empty() {
        return Some(vec![Q::zero(); n]);
    }
    solve(rows, rhs)
}

fn same_entries(a: &LinearSystem, b: &LinearSystem) -> bool {
    (0..3).all(|i| (0..3).all(|j| (&a.c[i][j] - &b.c[i][j]).simplify().is_zero()))
}

/// Values of the nonlinear parameters suggested by the atoms of `C`.
fn candidates(case: u8, l: &LinearSystem) -> Vec<Vec<(&'static str, Q)>> {
    let c = &l.c;
    let rate = |i: usize, j: usize| if c[i][j].is_zero() { None } else { exp_rate(&c[i][j]) };
    match case {
        1 => {
            let Some(al) = rate(0, 1) else { return vec![] };
            let be = rate(0, 2)
                .or_else(|| rate(2, 0).map(|m| -m))
                .or_else(|| rate(1, 2).map(|m| m + &al))
                .or_else(|| rate(2, 1).map(|m| &al - m))
                .unwrap_or_else(Q::zero);
            vec![vec![("alpha", al), ("beta", be)]]
        }
        2 => {
            let (Some(al), Some(nu)) = (rate(0, 1), trig_rate(&c[0][1]).or_else(|| trig_rate(&c[0][2]))) else {
                return vec![];
            };
            vec![vec![("alpha", al.clone()), ("c", nu.clone())], vec![("alpha", al), ("c", -nu)]]
        }
        3 => {
            let al = rate(0, 1)
                .or_else(|| rate(0, 2))
                .or_else(|| rate(1, 0).map(|m| -m))
                .or_else(|| rate(2, 0).map(|m| -m))
                .unwrap_or_else(Q::zero);
            vec![vec![("alpha", al)]]
        }
        4 => vec![vec![("alpha", q(0))]],
        _ => vec![],
    }
}

/// Solve for the linear parameters of a case once the nonlinear ones are fixed.
fn match_template(case: u8, fixed: &[(&'static str, Q)], l: &LinearSystem) -> Option<CanonicalParams> {
    const PREFIX: &str = "_p_";
    let tp = template_params(case, fixed, PREFIX).ok()?;
    let (sys, _) = build_canonical(&tp).ok()?;
    let names = param_names(case)?;
    let free: Vec<&str> = names.iter().copied().filter(|n| fixed.iter().all(|(f, _)| f != n)).collect();
    let unknowns: Vec<String> = free.iter().map(|n| format!("{PREFIX}{n}")).collect();
    let eqs: Vec<Expr> = (0..9).map(|k| &l.c[k / 3][k % 3] - &sys.c[k / 3][k % 3]).collect();
    let (rows, rhs) = coefficient_rows(&eqs, &unknowns)?;
    let sol = solve_rows(&rows, &rhs, unknowns.len())?;
    let pairs = fixed
        .iter()
        .map(|(n, v)| (*n, Expr::rational(v.clone())))
        .chain(free.iter().zip(sol).map(|(n, v)| (*n, Expr::rational(v))));
    let p = CanonicalParams::from_pairs(case, pairs).ok()?;
    let (fitted, _) = build_canonical(&p).ok()?;
    same_entries(&fitted, l).then_some(p)
}

/// Canonical parameters reproducing `C` exactly, if some template matches.
pub fn fit_params(l: &LinearSystem) -> Option<CanonicalParams> {
    (1..=4u8).find_map(|case| candidates(case, l).iter().find_map(|f| match_template(case, f, l)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    CanonicalCase(u8),
    Degenerate(DegeneracyClass),
    TrivialOnly,
    Unclassified,
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub generator: PointGenerator,
    /// Largest absolute residual over a fixed sample grid; zero when the
    /// residuals vanish in normal form.
    pub residual_max_abs: f64,
    pub symbolic: bool,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub params: Option<CanonicalParams>,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

/// Largest absolute value of the residuals over a fixed grid of points.
pub fn residual_max_abs(res: &[Expr; 3]) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..8 {
        let t = k as f64;
        let mut at = ValueBindings::new();
        at.set("x", Value::Float(0.55 + 0.2 * t));
        for (i, v) in DEP.iter().enumerate() {
            at.set(v, Value::Float(1.0 + 0.3 * t - 0.4 * i as f64));
        }
        for (i, v) in DEP1.iter().enumerate() {
            at.set(v, Value::Float(0.2 * i as f64 - 0.1 * t));
        }
        for r in res {
            let v = r.evaluate(&at).map(|v| v.to_f64()).unwrap_or(f64::NAN);
            worst = if v.is_nan() { f64::NAN } else { worst.max(v.abs()) };
        }
    }
    worst
}

/// Admission check of a generator, summarized.
pub fn witness(g: &PointGenerator, l: &LinearSystem) -> Result<(Witness, bool), ClassifyError> {
    let adm = check_admitted(g, &l.to_system(), SEED)?;
    let symbolic = adm.symbolic();
    let residual_max_abs = if symbolic { 0.0 } else { residual_max_abs(&adm.residuals) };
    Ok((Witness { generator: g.clone(), residual_max_abs, symbolic }, adm.admitted))
}

/// Generators `d/dx + (A y).grad` and `(A y).grad` with constant `A`.
#[derive(Clone, Debug, Default)]
pub struct NormalizedGenerators {
    /// One solution of `C' = A C - C A`, if any.
    pub translation: Option<[[Q; 3]; 3]>,
    /// Basis of the commutant `A C = C A`; always contains the identity.
    pub commutant: Vec<[[Q; 3]; 3]>,
}

fn unknown_matrix() -> ([[Expr; 3]; 3], Vec<String>) {
    let names: Vec<String> = (0..9).map(|k| format!("_A_{}{}", k / 3 + 1, k % 3 + 1)).collect();
    let m = core::array::from_fn(|i| core::array::from_fn(|j| Expr::sym(&names[3 * i + j])));
    (m, names)
}

fn to_matrix(v: &[Q]) -> [[Q; 3]; 3] {
    core::array::from_fn(|i| core::array::from_fn(|j| v[3 * i + j].clone()))
}

fn commutator(a: &[[Expr; 3]; 3], c: &[[Expr; 3]; 3]) -> [[Expr; 3]; 3] {
    core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            (0..3).fold(Expr::zero(), |s, k| s + &a[i][k] * &c[k][j] - &c[i][k] * &a[k][j])
        })
    })
}

/// Constant-matrix generators of a linear system, found by exact
/// coefficient matching over the atoms of `C`.
pub fn normalized_generators(l: &LinearSystem) -> Option<NormalizedGenerators> {
    let (a, names) = unknown_matrix();
    let br = commutator(&a, &l.c);
    let trans: Vec<Expr> = (0..9).map(|k| l.c[k / 3][k % 3].diff("x") - &br[k / 3][k % 3]).collect();
    let (rows, rhs) = coefficient_rows(&trans, &names)?;
    let translation = solve_rows(&rows, &rhs, 9).map(|v| to_matrix(&v));
    let comm: Vec<Expr> = br.iter().flatten().cloned().collect();
    let (rows, _) = coefficient_rows(&comm, &names)?;
    let commutant = if rows.is_empty() {
        (0..9).map(|k| to_matrix(&(0..9).map(|i| q((i == k) as i64)).collect::<Vec<_>>())).collect()
    } else {
        null_space(&rows).iter().map(|v| to_matrix(v)).collect()
    };
    Some(NormalizedGenerators { translation, commutant })
}

fn linear_generator(xi: Expr, a: &[[Q; 3]; 3]) -> PointGenerator {
    let m = a.clone().map(|r| r.map(Expr::rational));
    let mut g = PointGenerator::linear(&m);
    g.xi = xi;
    g
}

fn is_constant(l: &LinearSystem) -> bool {
    l.c.iter().flatten().all(|e| e.as_rational().is_some() || e.is_zero())
}

/// Classify a linear system against the four canonical templates.
pub fn fit_canonical(l: &LinearSystem) -> Result<ClassificationReport, ClassifyError> {
    check_atoms(l)?;
    let l = &LinearSystem { c: l.c.clone().map(|r| r.map(|e| e.simplify())) };
    let mut notes = Vec::new();
    if let Some(class) = is_degenerate(l) {
        notes.push(format!("degenerate pattern of class ({}): the system partially decouples", class.name()));
        return Ok(ClassificationReport { verdict: Verdict::Degenerate(class), params: None, witnesses: vec![], notes });
    }
    if let Some(p) = fit_params(l) {
        let (_, g) = build_canonical(&p)?;
        let (w, ok) = witness(&g, l)?;
        if ok {
            let verdict = Verdict::CanonicalCase(p.case());
            return Ok(ClassificationReport { verdict, params: Some(p), witnesses: vec![w], notes });
        }
        notes.push(format!("template of case {} matched but its generator was not admitted", p.case()));
    }
    if is_constant(l) {
        notes.push("constant coefficients: excluded from the classification, d/dx is admitted".into());
    }
    let Some(found) = normalized_generators(l) else {
        notes.push("coefficients are not separable over the atom basis".into());
        return Ok(ClassificationReport { verdict: Verdict::Unclassified, params: None, witnesses: vec![], notes });
    };
    let mut witnesses = Vec::new();
    if let Some(a) = &found.translation {
        let (w, ok) = witness(&linear_generator(Expr::one(), a), l)?;
        if ok {
            witnesses.push(w);
            if let Some(m) = rational_to_f64(a) {
                if let Ok(tc) = classify_by_matrix(&Matrix3(m)) {
                    notes.push(format!(
                        "admits d/dx + (Ay).grad with A of Jordan type {}: case {} after a change of variables",
                        tc.jordan.kind.name(),
                        tc.case
                    ));
                }
            }
        }
    }
    if found.commutant.len() > 1 {
        for a in &found.commutant {
            let (w, ok) = witness(&linear_generator(Expr::zero(), a), l)?;
            if ok {
                witnesses.push(w);
            }
        }
        notes.push(format!("commutant of C has dimension {}", found.commutant.len()));
    }
    let verdict = if witnesses.is_empty() {
        notes.push("only the trivial generators among d/dx + (Ay).grad and (Ay).grad; reparametrized generators are not searched".into());
        Verdict::TrivialOnly
    } else {
        Verdict::Unclassified
    };
    Ok(ClassificationReport { verdict, params: None, witnesses, notes })
}

fn rational_to_f64(a: &[[Q; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[i][j].to_f64()?;
        }
    }
    Some(out)
}

fn draw_q(rng: &mut ChaCha8Rng) -> Q {
    q_frac(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn draw_nonzero(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let v = draw_q(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Independent generator for draw `index` of `case`; the same triple always
/// yields the same stream, whatever order draws are evaluated in.
pub fn draw_rng(seed: u64, case: u8, index: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
    rng.set_stream((u64::from(case) << 48) | index);
    rng
}

/// Random canonical parameters: `c != 0` in case 2, `gamma != 0` and
/// `alpha = 0` in case 4.
pub fn draw_params(case: u8, rng: &mut ChaCha8Rng) -> Result<CanonicalParams, CanonicalError> {
    let names = param_names(case).ok_or(CanonicalError::UnknownCase(case))?;
    let vals: Vec<Q> = names
        .iter()
        .map(|n| match (case, *n) {
            (2, "c") | (4, "gamma") => draw_nonzero(rng),
            (4, "alpha") => Q::zero(),
            _ => draw_q(rng),
        })
        .collect();
    CanonicalParams::rational(case, &vals)
}

#[derive(Clone, Debug)]
pub struct DrawOutcome {
    pub case: u8,
    pub index: u64,
    pub params: CanonicalParams,
    pub tests: [ZeroTest; 3],
}

impl DrawOutcome {
    /// Residuals vanished in normal form; numeric agreement alone does not count.
    pub fn passed(&self) -> bool {
        self.tests.iter().all(|t| *t == ZeroTest::Symbolic)
    }
}

/// One theorem check: the canonical generator against its random system.
pub fn theorem_draw(seed: u64, case: u8, index: u64) -> Result<DrawOutcome, ClassifyError> {
    let params = draw_params(case, &mut draw_rng(seed, case, index, 0))?;
    let (sys, gen) = build_canonical(&params)?;
    let adm = check_admitted(&gen, &sys.to_system(), seed ^ index)?;
    Ok(DrawOutcome { case, index, params, tests: adm.tests })
}

#[derive(Clone, Debug)]
pub struct CaseSummary {
    pub case: u8,
    pub draws: u64,
    pub symbolic: u64,
    pub numeric_only: u64,
    pub failures: Vec<DrawOutcome>,
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub seed: u64,
    pub draws: u64,
    pub cases: Vec<CaseSummary>,
}

impl TheoremReport {
    pub fn checks(&self) -> u64 {
        self.cases.iter().map(|c| c.draws).sum()
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.symbolic == c.draws)
    }
}

/// Gather outcomes, in any order, into per-case summaries.
pub fn summarize(seed: u64, draws: u64, mut outcomes: Vec<DrawOutcome>) -> TheoremReport {
    outcomes.sort_by_key(|o| (o.case, o.index));
    let cases = (1..=4u8)
        .map(|case| {
            let mine: Vec<_> = outcomes.iter().filter(|o| o.case == case).collect();
            let symbolic = mine.iter().filter(|o| o.passed()).count() as u64;
            let numeric_only = mine
                .iter()
                .filter(|o| !o.passed() && o.tests.iter().all(|t| t.is_zero()))
                .count() as u64;
            CaseSummary {
                case,
                draws: mine.len() as u64,
                symbolic,
                numeric_only,
                failures: mine.iter().filter(|o| !o.passed()).map(|o| (*o).clone()).collect(),
            }
        })
        .collect();
    TheoremReport { seed, draws, cases }
}

/// `draws` random systems per case, each checked against its generator.
pub fn theorem_suite(seed: u64, draws: u64) -> Result<TheoremReport, ClassifyError> {
    let mut out = Vec::new();
    for case in 1..=4u8 {
        for index in 0..draws {
            out.push(theorem_draw(seed, case, index)?);
        }
    }
    Ok(summarize(seed, draws, out))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Generator of the next case, with its own random parameters.
    WrongCase,
    /// A rational multiple of one dependent variable added to one `eta_i`.
    Eta,
    /// `xi = 1 + r x`.
    Xi,
}

#[derive(Clone, Debug)]
pub struct MutationOutcome {
    pub case: u8,
    pub index: u64,
    pub mutation: Mutation,
    pub generator: PointGenerator,
    pub rejected: bool,
}

/// Corrupt the canonical generator of a random system and check that the
/// admission test rejects it.
pub fn mutation_draw(seed: u64, case: u8, index: u64) -> Result<MutationOutcome, ClassifyError> {
    let mut rng = draw_rng(seed, case, index, 0x6d75_7461);
    let params = draw_params(case, &mut rng)?;
    let (sys, mut gen) = build_canonical(&params)?;
    let mutation = [Mutation::WrongCase, Mutation::Eta, Mutation::Xi][rng.gen_range(0..3)];
    match mutation {
        Mutation::WrongCase => {
            let other = case % 4 + 1;
            gen = build_canonical(&draw_params(other, &mut rng)?)?.1;
        }
        Mutation::Eta => {
            let (i, v) = (rng.gen_range(0..3), rng.gen_range(0..3));
            gen.eta[i] = &gen.eta[i] + Expr::rational(draw_nonzero(&mut rng)) * Expr::sym(DEP[v]);
        }
        Mutation::Xi => gen.xi = Expr::one() + Expr::rational(draw_nonzero(&mut rng)) * Expr::sym("x"),
    }
    let adm = check_admitted(&gen, &sys.to_system(), seed ^ index)?;
    Ok(MutationOutcome { case, index, mutation, generator: gen, rejected: !adm.admitted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse;
    use num_traits::Signed;

    fn m(rows: [[f64; 3]; 3]) -> Matrix3 {
        Matrix3(rows)
    }

    fn gp(tc: &TheoremCase, n: &str) -> Q {
        tc.params.get(n).as_rational().unwrap()
    }

    #[test]
    fn matrix_examples() {
        // Eigenvalues are sorted ascending: a = 1, b = 2, d = 3.
        let tc = classify_by_matrix(&m([[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]])).unwrap();
        assert_eq!((tc.case, gp(&tc, "alpha"), gp(&tc, "beta")), (1, q(-1), q(-2)));
        assert_eq!(tc.generator.eta[1], parse("z").unwrap());
        let tc = classify_by_matrix(&m([[1.0, 0.0, 0.0], [0.0, 0.0, 2.0], [0.0, -2.0, 0.0]])).unwrap();
        assert_eq!((tc.case, gp(&tc, "alpha"), gp(&tc, "c").abs()), (2, q(1), q(2)));
        let tc = classify_by_matrix(&m([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])).unwrap();
        assert_eq!((tc.case, gp(&tc, "alpha")), (4, q(0)));
    }

    #[test]
    fn snapping() {
        assert_eq!(snap(2.9999999999996), q(3));
        assert_eq!(snap(-0.3333333333333), q_frac(-1, 3));
        assert_eq!(snap(0.5), q_frac(1, 2));
    }

    #[test]
    fn round_trip_each_case() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for case in 1..=4 {
            for _ in 0..5 {
                let p = draw_params(case, &mut rng).unwrap();
                let l = build_canonical(&p).unwrap().0;
                if is_degenerate(&l).is_some() {
                    continue;
                }
                let r = fit_canonical(&l).unwrap();
                assert_eq!(r.verdict, Verdict::CanonicalCase(case), "{:?}", r.notes);
                assert_eq!(r.params.unwrap(), p);
            }
        }
    }

    #[test]
    fn zero_and_constant_systems() {
        assert_eq!(fit_canonical(&LinearSystem::zero()).unwrap().verdict, Verdict::Degenerate(DegeneracyClass::A));
        let c = [[1, 2, 0], [0, 1, 3], [5, 0, 2]].map(|r| r.map(Expr::int));
        let r = fit_canonical(&LinearSystem { c }).unwrap();
        assert_eq!(r.verdict, Verdict::Unclassified);
        assert!(r.notes.iter().any(|n| n.contains("constant coefficients")));
    }

    #[test]
    fn rejects_foreign_atoms() {
        let mut c = LinearSystem::zero().c;
        c[0][1] = parse("ln(x)").unwrap();
        assert!(matches!(fit_canonical(&LinearSystem { c }), Err(ClassifyError::UnsupportedAtoms(_))));
        let mut c = LinearSystem::zero().c;
        c[0][1] = parse("exp(x^2)").unwrap();
        assert!(matches!(fit_canonical(&LinearSystem { c }), Err(ClassifyError::UnsupportedAtoms(_))));
    }

    #[test]
    fn conjugated_canonical_system_gets_a_hint() {
        // Case 1 with y and z swapped; c12 = 2 exp(-x) is not normalized.
        let p = CanonicalParams::rational(1, &[1, 2, 2, 1, 2, 1, 3, 1, 1, 2].map(q)).unwrap();
        let c = build_canonical(&p).unwrap().0.c;
        let perm = [1, 0, 2];
        let swapped = LinearSystem { c: core::array::from_fn(|i| core::array::from_fn(|j| c[perm[i]][perm[j]].clone())) };
        let r = fit_canonical(&swapped).unwrap();
        assert_eq!(r.verdict, Verdict::Unclassified);
        assert!(r.witnesses.iter().all(|w| w.symbolic));
        assert!(r.notes.iter().any(|n| n.contains("case 1 after a change of variables")), "{:?}", r.notes);
    }

    #[test]
    fn suite_and_controls() {
        let rep = theorem_suite(42, 3).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.checks(), 12);
        let empty = theorem_suite(42, 0).unwrap();
        assert_eq!(empty.checks(), 0);
        assert!(empty.cases.iter().all(|c| c.failures.is_empty()));
        // Case 3 generator on a case 1 system.
        let p1 = CanonicalParams::rational(1, &[1, 1, 2, 1, 1, 2, 1, 3, 1, 1].map(q)).unwrap();
        let sys = build_canonical(&p1).unwrap().0;
        let g3 = build_canonical(&CanonicalParams::rational(3, &[1; 10].map(q)).unwrap()).unwrap().1;
        assert!(!witness(&g3, &sys).unwrap().1);
        let rejected = (0..20).filter(|i| mutation_draw(7, (i % 4 + 1) as u8, *i).unwrap().rejected).count();
        assert!(rejected >= 19);
    }

    #[test]
    fn draws_do_not_depend_on_order() {
        let a = theorem_draw(5, 2, 17).unwrap();
        let _ = theorem_draw(5, 2, 3).unwrap();
        assert_eq!(theorem_draw(5, 2, 17).unwrap().params, a.params);
    }
}
