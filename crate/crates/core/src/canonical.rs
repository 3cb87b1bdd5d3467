//! Linear systems `y'' = C(x) y`, the four canonical representatives with
//! their nontrivial generators, degeneracy patterns and the commutant test.

use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::{Expr, Q};
use crate::jordan::Matrix3;
use crate::linalg::RatMatrix3;
use crate::symmetry::{superposition_constraints, superposition_template, PointGenerator, SecondOrderSystem, DEP};

/// `F = C y` with `C` a 3x3 matrix of expressions in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub c: [[Expr; 3]; 3],
}

impl LinearSystem {
    pub fn new(c: [[Expr; 3]; 3]) -> Result<Self, CanonicalError> {
        for e in c.iter().flatten() {
            for v in DEP {
                if e.contains_symbol(v) {
                    return Err(CanonicalError::DependentInCoefficient(String::from(v)));
                }
            }
        }
        Ok(LinearSystem { c })
    }

    pub fn zero() -> Self {
        LinearSystem {
            c: core::array::from_fn(|_| core::array::from_fn(|_| Expr::zero())),
        }
    }

    pub fn from_rational(m: &RatMatrix3) -> Self {
        LinearSystem {
            c: core::array::from_fn(|i| core::array::from_fn(|j| Expr::rational(m.0[i][j].clone()))),
        }
    }

    pub fn to_system(&self) -> SecondOrderSystem {
        let y = DEP.map(Expr::sym);
        SecondOrderSystem {
            rhs: core::array::from_fn(|i| (0..3).map(|j| &self.c[i][j] * &y[j]).sum()),
        }
    }

    /// Read `C` back from a system that is linear homogeneous in `y, z, u`.
    pub fn from_system(s: &SecondOrderSystem) -> Option<Self> {
        let c: [[Expr; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| s.rhs[i].diff(DEP[j])));
        let l = LinearSystem::new(c).ok()?;
        let rebuilt = l.to_system();
        for i in 0..3 {
            if !(&rebuilt.rhs[i] - &s.rhs[i]).simplify().is_zero() {
                return None;
            }
        }
        Some(l)
    }

    pub fn trace(&self) -> Expr {
        &self.c[0][0] + &self.c[1][1] + &self.c[2][2]
    }

    pub fn is_traceless(&self) -> bool {
        self.trace().simplify().is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CanonicalError {
    #[error("coefficient matrix mentions dependent variable `{0}`")]
    DependentInCoefficient(String),
    #[error("degenerate parameters: {0}")]
    DegenerateParams(&'static str),
    #[error("case {case} expects parameters {expected:?}")]
    WrongParams { case: u8, expected: &'static [&'static str] },
    #[error("unknown canonical case {0}")]
    UnknownCase(u8),
}

/// Parameter names of each canonical case, in storage order.
pub fn param_names(case: u8) -> Option<&'static [&'static str]> {
    Some(match case {
        1 => &["a11", "a13", "a21", "a22", "a23", "a31", "a32", "a33", "alpha", "beta"],
        2 => &["a11", "a21", "a31", "beta", "gamma", "c1", "c2", "alpha", "c"],
        3 => &["a11", "a12", "a13", "a21", "a22", "a23", "a31", "a32", "a33", "alpha"],
        4 => &["lambda", "beta", "gamma", "alpha"],
        _ => return None,
    })
}

/// Parameters of a canonical case. Values are expressions, so they may be
/// rationals or free symbols.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalParams {
    case: u8,
    values: Vec<Expr>,
}

impl CanonicalParams {
    pub fn new(case: u8, values: Vec<Expr>) -> Result<Self, CanonicalError> {
        let names = param_names(case).ok_or(CanonicalError::UnknownCase(case))?;
        if values.len() != names.len() {
            return Err(CanonicalError::WrongParams { case, expected: names });
        }
        Ok(CanonicalParams { case, values })
    }

    /// Build from `(name, value)` pairs; every name must be given exactly once.
    pub fn from_pairs<'a>(case: u8, pairs: impl IntoIterator<Item = (&'a str, Expr)>) -> Result<Self, CanonicalError> {
        let names = param_names(case).ok_or(CanonicalError::UnknownCase(case))?;
        let mut values: Vec<Option<Expr>> = alloc::vec![None; names.len()];
        for (k, v) in pairs {
            let i = names
                .iter()
                .position(|n| *n == k)
                .ok_or(CanonicalError::WrongParams { case, expected: names })?;
            if values[i].replace(v).is_some() {
                return Err(CanonicalError::WrongParams { case, expected: names });
            }
        }
        let values = values
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or(CanonicalError::WrongParams { case, expected: names })?;
        Ok(CanonicalParams { case, values })
    }

    /// Every parameter left as the symbol of its own name.
    pub fn symbolic(case: u8) -> Result<Self, CanonicalError> {
        let names = param_names(case).ok_or(CanonicalError::UnknownCase(case))?;
        Ok(CanonicalParams {
            case,
            values: names.iter().map(|n| Expr::sym(n)).collect(),
        })
    }

    pub fn rational(case: u8, values: &[Q]) -> Result<Self, CanonicalError> {
        Self::new(case, values.iter().cloned().map(Expr::rational).collect())
    }

    pub fn case(&self) -> u8 {
        self.case
    }

    pub fn names(&self) -> &'static [&'static str] {
        param_names(self.case).unwrap_or(&[])
    }

    pub fn values(&self) -> &[Expr] {
        &self.values
    }

    pub fn get(&self, name: &str) -> &Expr {
        let i = self.names().iter().position(|n| *n == name).expect("unknown parameter name");
        &self.values[i]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&'static str, &Expr)> {
        self.names().iter().copied().zip(&self.values)
    }
}

fn known_zero(e: &Expr) -> bool {
    e.simplify().is_zero()
}

/// The canonical linear system of a case and its nontrivial generator.
pub fn build_canonical(p: &CanonicalParams) -> Result<(LinearSystem, PointGenerator), CanonicalError> {
    let x = Expr::sym("x");
    let e = |k: &Expr| Expr::exp(&(k * &x));
    let [y, z, u] = DEP.map(Expr::sym);
    let g = |n: &str| p.get(n).clone();
    let zero = Expr::zero;
    match p.case() {
        1 => {
            let (al, be) = (g("alpha"), g("beta"));
            let c = [
                [g("a11"), e(&al), e(&be) * g("a13")],
                [e(&-&al) * g("a21"), g("a22"), e(&(&be - &al)) * g("a23")],
                [e(&-&be) * g("a31"), e(&(&al - &be)) * g("a32"), g("a33")],
            ];
            let gen = PointGenerator {
                xi: Expr::one(),
                eta: [zero(), -(&al * &z), -(&be * &u)],
            };
            Ok((LinearSystem { c }, gen))
        }
        2 => {
            let (al, cc) = (g("alpha"), g("c"));
            if known_zero(&cc) {
                return Err(CanonicalError::DegenerateParams("case 2 requires c != 0"));
            }
            let (cos1, sin1) = (Expr::cos(&(&cc * &x)), Expr::sin(&(&cc * &x)));
            let two_cx = Expr::int(2) * &cc * &x;
            let (cos2, sin2) = (Expr::cos(&two_cx), Expr::sin(&two_cx));
            let (be, ga, c1, c2) = (g("beta"), g("gamma"), g("c1"), g("c2"));
            let (a21, a31) = (g("a21"), g("a31"));
            let c = [
                [g("a11"), e(&al) * &cos1, -(e(&al) * &sin1)],
                [
                    e(&-&al) * (&cos1 * &a21 + &sin1 * &a31),
                    &cos2 * &be + &sin2 * &ga + &c2,
                    &cos2 * &ga - &sin2 * &be - &c1,
                ],
                [
                    e(&-&al) * (&cos1 * &a31 - &sin1 * &a21),
                    &cos2 * &ga - &sin2 * &be + &c1,
                    -(&cos2 * &be + &sin2 * &ga - &c2),
                ],
            ];
            let gen = PointGenerator {
                xi: Expr::one(),
                eta: [&al * &y, &cc * &u, -(&cc * &z)],
            };
            Ok((LinearSystem { c }, gen))
        }
        3 => {
            let al = g("alpha");
            let (a12, a22, a31, a32, a33) = (g("a12"), g("a22"), g("a31"), g("a32"), g("a33"));
            let c = [
                [g("a11"), e(&al) * &a12, e(&al) * (-(&a12 * &x) + g("a13"))],
                [
                    e(&-&al) * (g("a21") + &a31 * &x),
                    &a22 + &a32 * &x,
                    g("a23") + (&a33 - &a22) * &x - &a32 * &x * &x,
                ],
                [e(&-&al) * &a31, a32.clone(), &a33 - &a32 * &x],
            ];
            let gen = PointGenerator {
                xi: Expr::one(),
                eta: [&al * &y, u.clone(), zero()],
            };
            Ok((LinearSystem { c }, gen))
        }
        4 => {
            let (la, be, ga, al) = (g("lambda"), g("beta"), g("gamma"), g("alpha"));
            if known_zero(&ga) {
                return Err(CanonicalError::DegenerateParams(
                    "case 4 with gamma = 0 is reduced to the degenerate case H = 0",
                ));
            }
            if !known_zero(&al) {
                return Err(CanonicalError::DegenerateParams(
                    "case 4 requires alpha = 0: a single Jordan block has one eigenvalue",
                ));
            }
            let half = Expr::frac(1, 2);
            let w = [Expr::one(), -x.clone(), &half * &x * &x];
            let rows = [
                &la + &be * &x + &half * &ga * &x * &x,
                e(&-&al) * (&be + &ga * &x),
                e(&-&al) * &ga,
            ];
            let c = core::array::from_fn(|i| core::array::from_fn(|j| &rows[i] * &w[j]));
            let gen = PointGenerator {
                xi: Expr::one(),
                eta: [z.clone(), u.clone(), zero()],
            };
            Ok((LinearSystem { c }, gen))
        }
        k => Err(CanonicalError::UnknownCase(k)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegeneracyClass {
    /// One equation decouples: some row of `C` has zero off-diagonal entries.
    A,
    /// Two equations decouple from the third: some column of `C` has zero
    /// off-diagonal entries.
    B,
}

impl DegeneracyClass {
    pub fn name(self) -> &'static str {
        match self {
            DegeneracyClass::A => "a",
            DegeneracyClass::B => "b",
        }
    }
}

/// Zero pattern of a degenerate system, up to relabeling `y, z, u`.
///
/// Class (a) is `c12 = c13 = 0` and class (b) is `c13 = c23 = 0`; under the
/// six simultaneous row/column permutations these become "a row with zero
/// off-diagonal part" and "a column with zero off-diagonal part".
pub fn is_degenerate(l: &LinearSystem) -> Option<DegeneracyClass> {
    let z: [[bool; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| known_zero(&l.c[i][j])));
    let off = |i: usize| [(i + 1) % 3, (i + 2) % 3];
    if (0..3).any(|i| off(i).iter().all(|&j| z[i][j])) {
        return Some(DegeneracyClass::A);
    }
    if (0..3).any(|j| off(j).iter().all(|&i| z[i][j])) {
        return Some(DegeneracyClass::B);
    }
    None
}

/// Entries of `C A - A C`. `A` is taken exactly (every float is a rational).
pub fn commutant_condition(a: &Matrix3, l: &LinearSystem) -> [[Expr; 3]; 3] {
    let ar = RatMatrix3::from_f64(&a.0).expect("finite matrix");
    commutant_condition_exact(&ar, l)
}

pub fn commutant_condition_exact(a: &RatMatrix3, l: &LinearSystem) -> [[Expr; 3]; 3] {
    core::array::from_fn(|i| {
        core::array::from_fn(|j| {
            let mut e = Expr::zero();
            for k in 0..3 {
                e = e + &l.c[i][k] * &Expr::rational(a.0[k][j].clone());
                e = e - &Expr::rational(a.0[i][k].clone()) * &l.c[k][j];
            }
            e.simplify()
        })
    })
}

/// The generators every linear system admits.
#[derive(Clone, Debug, PartialEq)]
pub struct TrivialGenerators {
    pub scaling: PointGenerator,
    /// `zeta1(x) d/dy + zeta2(x) d/dz + zeta3(x) d/du`.
    pub template: PointGenerator,
    /// `zeta_i'' - sum_j c_ij zeta_j`, which must vanish for the template.
    pub constraints: [Expr; 3],
}

pub fn trivial_generators(l: &LinearSystem) -> TrivialGenerators {
    TrivialGenerators {
        scaling: PointGenerator::scaling(),
        template: superposition_template(),
        constraints: superposition_constraints(&l.c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, q};
    use crate::symmetry::{check_admitted, determining_residual};

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    #[test]
    fn case1_specialization() {
        let v = alloc::vec![q(0); 10];
        let params = CanonicalParams::rational(1, &v).unwrap();
        let (l, g) = build_canonical(&params).unwrap();
        let s = l.to_system();
        assert_eq!(s.rhs, [p("z"), Expr::zero(), Expr::zero()]);
        assert_eq!(g, PointGenerator::translation());
    }

    #[test]
    fn case4_example() {
        let params = CanonicalParams::rational(4, &[q(0), q(0), q(1), q(0)]).unwrap();
        let (l, g) = build_canonical(&params).unwrap();
        let s = l.to_system();
        let w = p("y - x*z + x^2*u/2");
        assert_eq!(s.rhs[0], p("x^2/2") * &w);
        assert_eq!(s.rhs[1], p("x") * &w);
        assert_eq!(s.rhs[2], w);
        assert_eq!(g.eta, [p("z"), p("u"), Expr::zero()]);
        let bad = CanonicalParams::rational(4, &[q(1), q(2), q(0), q(0)]).unwrap();
        assert!(matches!(build_canonical(&bad), Err(CanonicalError::DegenerateParams(m)) if m.contains("H = 0")));
    }

    #[test]
    fn symbolic_cases_are_admitted() {
        for case in 1..=3 {
            let params = CanonicalParams::symbolic(case).unwrap();
            let (l, g) = build_canonical(&params).unwrap();
            let a = check_admitted(&g, &l.to_system(), 5).unwrap();
            assert!(a.admitted && a.symbolic(), "case {case}: {:?}", a.residuals);
        }
        let params =
            CanonicalParams::from_pairs(4, [("lambda", p("lambda")), ("beta", p("beta")), ("gamma", p("gamma")), ("alpha", Expr::zero())])
                .unwrap();
        let (l, g) = build_canonical(&params).unwrap();
        assert!(check_admitted(&g, &l.to_system(), 5).unwrap().symbolic());
    }

    #[test]
    fn degeneracy_examples() {
        let mut c = [[p("1"), p("0"), p("0")], [p("1"), p("1"), p("1")], [p("1"), p("1"), p("1")]];
        assert_eq!(is_degenerate(&LinearSystem::new(c.clone()).unwrap()), Some(DegeneracyClass::A));
        c[0] = [p("1"), p("1"), p("0")];
        c[1][2] = p("0");
        assert_eq!(is_degenerate(&LinearSystem::new(c).unwrap()), Some(DegeneracyClass::B));
        let ones: [[Expr; 3]; 3] = core::array::from_fn(|_| core::array::from_fn(|_| p("1")));
        assert_eq!(is_degenerate(&LinearSystem::new(ones).unwrap()), None);
        assert_eq!(is_degenerate(&LinearSystem::zero()), Some(DegeneracyClass::A));
    }

    #[test]
    fn commutant_examples() {
        let c: [[Expr; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| Expr::sym(&alloc::format!("c{}{}", i + 1, j + 1))));
        let l = LinearSystem::new(c).unwrap();
        assert!(commutant_condition(&Matrix3::IDENTITY, &l).iter().flatten().all(Expr::is_zero));
        let k = commutant_condition(&Matrix3::diag(1.0, 2.0, 3.0), &l);
        assert_eq!(k[0][1], p("c12"));
        let k = commutant_condition(&Matrix3::diag(5.0, 5.0, 2.0), &l);
        assert!(k[0][1].is_zero());
    }

    #[test]
    fn trivial_template_residual_is_the_constraint() {
        let c: [[Expr; 3]; 3] = core::array::from_fn(|i| core::array::from_fn(|j| p(&alloc::format!("x^{} + {}", i, j))));
        let l = LinearSystem::new(c).unwrap();
        let t = trivial_generators(&l);
        let r = determining_residual(&t.template, &l.to_system());
        assert_eq!(r, t.constraints);
        assert!(check_admitted(&t.scaling, &l.to_system(), 1).unwrap().admitted);
    }
}
