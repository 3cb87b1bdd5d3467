//! General solution families of the determining equations.
//!
//! With `xi != 0` the generator is `d/dx + (A y) . grad` and the system obeys
//! `F_x + ((A y) . grad) F = A F`. With `xi = 0` it is `(A y + h(x)) . grad`
//! and the system obeys `((A y + h) . grad) F = A F + h''`. Both are checked
//! by [`verify_family`] as `X(F) - A F - h''`.
//!
//! Templates use the opaque functions `f, g, h`. In the `xi = 0` branch the
//! shifted variables `y + sigma_1` etc. are expanded, so every template is
//! written in `x, y, z, u`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::canonical::{CanonicalParams, LinearSystem};
use crate::expr::{zero_test, Bindings, Expr, ZeroTest, ZeroTestError};
use crate::jordan::JordanKind;
use crate::symmetry::{PointGenerator, DEP};

/// Opaque functions of the templates.
pub const FAMILY_FNS: [&str; 3] = ["f", "g", "h"];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FamilyError {
    #[error("unknown subcase `{0}`")]
    UnknownSubcase(String),
    #[error("subcase `{subcase}` requires {condition}")]
    InconsistentPredicate { subcase: &'static str, condition: &'static str },
    #[error("linearization needs a family from the xi != 0 branch")]
    NotXiNonzero,
}

/// Jordan type with symbolic parameters. Unused parameters are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanParams {
    pub kind: JordanKind,
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub d: Expr,
}

impl JordanParams {
    pub fn j1(a: Expr, b: Expr, d: Expr) -> Self {
        JordanParams { kind: JordanKind::J1, a, b, c: Expr::zero(), d }
    }

    pub fn j2(a: Expr, b: Expr, c: Expr) -> Self {
        JordanParams { kind: JordanKind::J2, a, b, c, d: Expr::zero() }
    }

    pub fn j3(a: Expr, b: Expr) -> Self {
        JordanParams { kind: JordanKind::J3, a, b, c: Expr::zero(), d: Expr::zero() }
    }

    pub fn j4(a: Expr) -> Self {
        JordanParams { kind: JordanKind::J4, a, b: Expr::zero(), c: Expr::zero(), d: Expr::zero() }
    }

    /// Parameters as the symbols `a, b, c, d`.
    pub fn symbolic(kind: JordanKind) -> Self {
        let s = Expr::sym;
        match kind {
            JordanKind::J1 => Self::j1(s("a"), s("b"), s("d")),
            JordanKind::J2 => Self::j2(s("a"), s("b"), s("c")),
            JordanKind::J3 => Self::j3(s("a"), s("b")),
            JordanKind::J4 => Self::j4(s("a")),
        }
    }

    pub fn matrix(&self) -> [[Expr; 3]; 3] {
        let (a, b, c, d) = (self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone());
        let (o, i) = (Expr::zero(), Expr::one());
        match self.kind {
            JordanKind::J1 => [[a, o.clone(), o.clone()], [o.clone(), b, o.clone()], [o.clone(), o, d]],
            JordanKind::J2 => [[a, o.clone(), o.clone()], [o.clone(), b.clone(), c.clone()], [o.clone(), -c, b]],
            JordanKind::J3 => [[a, o.clone(), o.clone()], [o.clone(), b.clone(), i], [o.clone(), o, b]],
            JordanKind::J4 => [[a.clone(), i.clone(), o.clone()], [o.clone(), a.clone(), i], [o.clone(), o, a]],
        }
    }
}

/// Which branch a family belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    XiNonzero,
    XiZero(Subcase),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionFamily {
    pub params: JordanParams,
    pub branch: Branch,
    /// `h1, h2, h3`; zero in the `xi != 0` branch.
    pub shift: [Expr; 3],
    /// `s, v, w`. When only two invariants exist the third entry
    /// is a coordinate along the generator so that the triple is a chart.
    pub invariants: [Expr; 3],
    /// `F, G, H`.
    pub templates: [Expr; 3],
    pub generator: PointGenerator,
}

impl SolutionFamily {
    pub fn kind(&self) -> JordanKind {
        self.params.kind
    }

    pub fn label(&self) -> String {
        match self.branch {
            Branch::XiNonzero => alloc::format!("{}: xi!=0", self.kind().name()),
            Branch::XiZero(s) => alloc::format!("{}: {}", self.kind().name(), s.label()),
        }
    }
}

fn x() -> Expr {
    Expr::sym("x")
}

fn opaque(args: &[Expr]) -> [Expr; 3] {
    FAMILY_FNS.map(|n| Expr::func(n, args.to_vec()))
}

/// The `xi != 0` family for a Jordan type, with generator `d/dx + (A y) . grad`.
pub fn xi_nonzero_family(p: &JordanParams) -> Result<SolutionFamily, FamilyError> {
    let x = x();
    let [y, z, u] = DEP.map(Expr::sym);
    let e = |k: &Expr| Expr::exp(&(k * &x));
    let (a, b) = (&p.a, &p.b);
    let (invariants, templates) = match p.kind {
        JordanKind::J1 => {
            let inv = [&y * e(&-a), &z * e(&-b), &u * e(&-&p.d)];
            let [f, g, h] = opaque(&inv);
            (inv, [e(a) * f, e(b) * g, e(&p.d) * h])
        }
        JordanKind::J2 => {
            if p.c.is_zero() {
                return Err(FamilyError::InconsistentPredicate { subcase: "J2", condition: "c != 0" });
            }
            let cx = &p.c * &x;
            let (co, si) = (Expr::cos(&cx), Expr::sin(&cx));
            let inv = [
                &y * e(&-a),
                e(&-b) * (&z * &co - &u * &si),
                e(&-b) * (&z * &si + &u * &co),
            ];
            let [f, g, h] = opaque(&inv);
            let tpl = [e(a) * f, e(b) * (&co * &g + &si * &h), e(b) * (&co * &h - &si * &g)];
            (inv, tpl)
        }
        JordanKind::J3 => {
            let inv = [&y * e(&-a), e(&-b) * (&z - &u * &x), e(&-b) * &u];
            let [f, g, h] = opaque(&inv);
            (inv, [e(a) * f, e(b) * (&h * &x + g), e(b) * h])
        }
        JordanKind::J4 => {
            let half = Expr::frac(1, 2);
            let inv = [
                e(&-a) * (&y - &x * &z + &half * &x * &x * &u),
                e(&-a) * (&z - &x * &u),
                e(&-a) * &u,
            ];
            let [f, g, h] = opaque(&inv);
            let tpl = [
                e(a) * (&half * &x * &x * &h + &g * &x + f),
                e(a) * (&h * &x + g),
                e(a) * h,
            ];
            (inv, tpl)
        }
    };
    let generator = PointGenerator {
        xi: Expr::one(),
        eta: PointGenerator::linear(&p.matrix()).eta,
    };
    Ok(SolutionFamily {
        params: p.clone(),
        branch: Branch::XiNonzero,
        shift: [Expr::zero(), Expr::zero(), Expr::zero()],
        invariants,
        templates,
        generator,
    })
}

/// Residuals of a family in its determining equations.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyResiduals {
    pub residuals: [Expr; 3],
    pub tests: [ZeroTest; 3],
}

impl FamilyResiduals {
    pub fn is_zero(&self) -> bool {
        self.tests.iter().all(|t| t.is_zero())
    }
}

/// `X(F_i) - sum_j A_ij F_j - h_i''` in normal form.
pub fn family_residuals(fam: &SolutionFamily) -> [Expr; 3] {
    let a = fam.params.matrix();
    core::array::from_fn(|i| {
        let mut r = fam.generator.apply(&fam.templates[i]) - fam.shift[i].diff_n("x", 2);
        for j in 0..3 {
            if !a[i][j].is_zero() {
                r = r - &a[i][j] * &fam.templates[j];
            }
        }
        r.simplify()
    })
}

pub fn verify_family(fam: &SolutionFamily, seed: u64) -> Result<FamilyResiduals, ZeroTestError> {
    let residuals = family_residuals(fam);
    let mut tests = [ZeroTest::Symbolic; 3];
    for i in 0..3 {
        tests[i] = zero_test(&residuals[i], seed.wrapping_add(i as u64))?;
    }
    Ok(FamilyResiduals { residuals, tests })
}

/// The enumerated `xi = 0` subcases. Predicates are explicit; they are
/// checked against the data, never inferred from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Subcase {
    J1Abd,
    J1AbD0,
    J1A,
    J1H1,
    J1H2,
    J2A,
    J2H1,
    J2H0,
    J3Ab,
    J3AH3,
    J3A,
    J3BH1,
    J3B,
    J3H1H3,
    J3H1,
    J3H3,
    J3Zero,
    J4A,
    J4H3,
    J4Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    A,
    B,
    C,
    D,
    H1,
    H2,
    H3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pred {
    Zero(Slot),
    NonZero(Slot),
}

impl Subcase {
    pub const ALL: [Subcase; 20] = [
        Subcase::J1Abd,
        Subcase::J1AbD0,
        Subcase::J1A,
        Subcase::J1H1,
        Subcase::J1H2,
        Subcase::J2A,
        Subcase::J2H1,
        Subcase::J2H0,
        Subcase::J3Ab,
        Subcase::J3AH3,
        Subcase::J3A,
        Subcase::J3BH1,
        Subcase::J3B,
        Subcase::J3H1H3,
        Subcase::J3H1,
        Subcase::J3H3,
        Subcase::J3Zero,
        Subcase::J4A,
        Subcase::J4H3,
        Subcase::J4Zero,
    ];

    pub fn kind(self) -> JordanKind {
        use Subcase::*;
        match self {
            J1Abd | J1AbD0 | J1A | J1H1 | J1H2 => JordanKind::J1,
            J2A | J2H1 | J2H0 => JordanKind::J2,
            J3Ab | J3AH3 | J3A | J3BH1 | J3B | J3H1H3 | J3H1 | J3H3 | J3Zero => JordanKind::J3,
            J4A | J4H3 | J4Zero => JordanKind::J4,
        }
    }

    /// Predicate text, e.g. `a!=0,b!=0,d=0`.
    pub fn label(self) -> &'static str {
        use Subcase::*;
        match self {
            J1Abd => "a!=0,b!=0,d!=0",
            J1AbD0 => "a!=0,b!=0,d=0",
            J1A => "a!=0,b=0,d=0",
            J1H1 => "a=0,b=0,d=0,h1!=0",
            J1H2 => "a=0,b=0,d=0,h1=0,h2!=0",
            J2A => "a!=0",
            J2H1 => "a=0,h1!=0",
            J2H0 => "a=0,h1=0",
            J3Ab => "a!=0,b!=0",
            J3AH3 => "a!=0,b=0,h3!=0",
            J3A => "a!=0,b=0,h3=0",
            J3BH1 => "a=0,b!=0,h1!=0",
            J3B => "a=0,b!=0,h1=0",
            J3H1H3 => "a=0,b=0,h1!=0,h3!=0",
            J3H1 => "a=0,b=0,h1!=0,h3=0",
            J3H3 => "a=0,b=0,h1=0,h3!=0",
            J3Zero => "a=0,b=0,h1=0,h3=0",
            J4A => "a!=0",
            J4H3 => "a=0,h3!=0",
            J4Zero => "a=0,h3=0",
        }
    }

    /// `J3: a=0,b!=0,h1=0` style tag.
    pub fn tag(self) -> String {
        alloc::format!("{}: {}", self.kind().name(), self.label())
    }

    /// Look up by Jordan type and predicate text (spaces ignored).
    pub fn from_label(kind: JordanKind, label: &str) -> Result<Subcase, FamilyError> {
        let norm: String = label.chars().filter(|c| !c.is_whitespace()).collect();
        Subcase::ALL
            .into_iter()
            .find(|s| s.kind() == kind && s.label() == norm)
            .ok_or_else(|| FamilyError::UnknownSubcase(alloc::format!("{}: {label}", kind.name())))
    }

    fn preds(self) -> Vec<Pred> {
        let mut out = Vec::new();
        for part in self.label().split(',') {
            let (name, nonzero) = match part.split_once("!=") {
                Some((n, _)) => (n, true),
                None => (part.split_once('=').map(|(n, _)| n).unwrap_or(part), false),
            };
            let slot = match name {
                "a" => Slot::A,
                "b" => Slot::B,
                "d" => Slot::D,
                "h1" => Slot::H1,
                "h2" => Slot::H2,
                _ => Slot::H3,
            };
            out.push(if nonzero { Pred::NonZero(slot) } else { Pred::Zero(slot) });
        }
        if self.kind() == JordanKind::J2 {
            out.push(Pred::NonZero(Slot::C));
        }
        out
    }
}

/// Input of the `xi = 0` branch: Jordan parameters and the shift `h(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct XiZeroData {
    pub params: JordanParams,
    pub h: [Expr; 3],
}

impl XiZeroData {
    /// Opaque shifts `h1(x), h2(x), h3(x)`.
    pub fn opaque_shift(params: JordanParams) -> Self {
        XiZeroData {
            params,
            h: ["h1", "h2", "h3"].map(|n| Expr::func(n, alloc::vec![x()])),
        }
    }

    fn slot(&self, s: Slot) -> &Expr {
        match s {
            Slot::A => &self.params.a,
            Slot::B => &self.params.b,
            Slot::C => &self.params.c,
            Slot::D => &self.params.d,
            Slot::H1 => &self.h[0],
            Slot::H2 => &self.h[1],
            Slot::H3 => &self.h[2],
        }
    }

    fn check(&self, sub: Subcase) -> Result<(), FamilyError> {
        if self.params.kind != sub.kind() {
            return Err(FamilyError::InconsistentPredicate {
                subcase: sub.label(),
                condition: "a matching Jordan type",
            });
        }
        for p in sub.preds() {
            let (slot, want_zero) = match p {
                Pred::Zero(s) => (s, true),
                Pred::NonZero(s) => (s, false),
            };
            if self.slot(slot).is_zero() != want_zero {
                return Err(FamilyError::InconsistentPredicate {
                    subcase: sub.label(),
                    condition: pred_text(p),
                });
            }
        }
        Ok(())
    }
}

fn pred_text(p: Pred) -> &'static str {
    match p {
        Pred::Zero(Slot::A) => "a = 0",
        Pred::Zero(Slot::B) => "b = 0",
        Pred::Zero(Slot::C) => "c = 0",
        Pred::Zero(Slot::D) => "d = 0",
        Pred::Zero(Slot::H1) => "h1 = 0",
        Pred::Zero(Slot::H2) => "h2 = 0",
        Pred::Zero(Slot::H3) => "h3 = 0",
        Pred::NonZero(Slot::A) => "a != 0",
        Pred::NonZero(Slot::B) => "b != 0",
        Pred::NonZero(Slot::C) => "c != 0",
        Pred::NonZero(Slot::D) => "d != 0",
        Pred::NonZero(Slot::H1) => "h1 != 0",
        Pred::NonZero(Slot::H2) => "h2 != 0",
        Pred::NonZero(Slot::H3) => "h3 != 0",
    }
}

/// The `xi = 0` family of a subcase, with generator `(A y + h) . grad`.
///
/// Shifted variables are `Y = y + sigma_1` etc. with `A sigma`
/// matching the constant part of `h`; then `F = Fbar - sigma_1''`.
pub fn xi_zero_family(data: &XiZeroData, sub: Subcase) -> Result<SolutionFamily, FamilyError> {
    data.check(sub)?;
    let p = &data.params;
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let [h1, h2, h3] = data.h.clone();
    let hpp = data.h.clone().map(|e| e.diff_n("x", 2));
    let x = x();
    let [y, z, u] = DEP.map(Expr::sym);
    let half = Expr::frac(1, 2);
    let zero = Expr::zero;
    let fxs = |s: &Expr, v: &Expr| opaque(&[x.clone(), s.clone(), v.clone()]);

    // Templates already in original variables (J1), or overbar templates
    // together with the shift sigma.
    let (invariants, templates, sigma): ([Expr; 3], [Expr; 3], [Expr; 3]) = match sub {
        Subcase::J1Abd | Subcase::J1AbD0 | Subcase::J1A => {
            let py = a * &y + &h1;
            let (pz, pu) = (b * &z + &h2, d * &u + &h3);
            let lny = Expr::ln(&py);
            let w = &lny * &a.inv();
            let (s, v) = match sub {
                Subcase::J1Abd => (
                    Expr::exp(&(a * &Expr::ln(&pz) - b * &lny)),
                    Expr::exp(&(b * &Expr::ln(&pu) - d * &Expr::ln(&pz))),
                ),
                Subcase::J1AbD0 => (
                    Expr::exp(&(a * &Expr::ln(&pz) - b * &lny)),
                    &u - &h3 * &b.inv() * Expr::ln(&pz),
                ),
                _ => (&z - &h2 * &a.inv() * &lny, &u - &h3 * &a.inv() * &lny),
            };
            let [f, g, h] = fxs(&s, &v);
            let log_part = |k: &Expr, fun: Expr| k * &a.inv() * &lny + fun;
            let lin_part = |p: &Expr, k: &Expr, fun: Expr, coef: &Expr| (p * &fun - k) * &coef.inv();
            let big_f = lin_part(&py, &hpp[0], f, a);
            let big_g = match sub {
                Subcase::J1A => log_part(&hpp[1], g),
                _ => lin_part(&pz, &hpp[1], g, b),
            };
            let big_h = match sub {
                Subcase::J1Abd => lin_part(&pu, &hpp[2], h, d),
                _ => log_part(&hpp[2], h),
            };
            ([s, v, w], [big_f, big_g, big_h], [zero(), zero(), zero()])
        }
        Subcase::J1H1 => {
            let r = h1.inv();
            let s = &z - &h2 * &r * &y;
            let v = &u - &h3 * &r * &y;
            let [f, g, h] = fxs(&s, &v);
            let tpl = [&hpp[0] * &r * &y + f, &hpp[1] * &r * &y + g, &hpp[2] * &r * &y + h];
            ([s, v, &y * &r], tpl, [zero(), zero(), zero()])
        }
        Subcase::J1H2 => {
            let r = h2.inv();
            let s = &u - &h3 * &r * &z;
            let [f, g, h] = opaque(&[x.clone(), s.clone()]);
            let tpl = [f, &hpp[1] * &r * &z + g, &hpp[2] * &r * &z + h];
            ([s, y.clone(), &z * &r], tpl, [zero(), zero(), zero()])
        }
        Subcase::J2A | Subcase::J2H1 | Subcase::J2H0 => {
            let r = (b * b + c * c).inv();
            let s1 = if sub == Subcase::J2A { &h1 * &a.inv() } else { zero() };
            let sigma = [s1, (b * &h2 - c * &h3) * &r, (c * &h2 + b * &h3) * &r];
            let (yy, zz, uu) = (&y + &sigma[0], &z + &sigma[1], &u + &sigma[2]);
            if sub == Subcase::J2H0 && b.is_zero() {
                // Pure rotation: Z, U themselves carry the G, H pair.
                let v = &zz * &zz + &uu * &uu;
                let [f, g, h] = opaque(&[x.clone(), v.clone(), yy.clone()]);
                let tpl = [f, &zz * &g + &uu * &h, &uu * &g - &zz * &h];
                ([&zz * &uu.inv(), v, yy], tpl, sigma)
            } else {
                let s = match sub {
                    Subcase::J2A => Expr::ln(&yy) * a.inv(),
                    Subcase::J2H1 => &y * &h1.inv(),
                    _ => Expr::ln(&(&zz * &zz + &uu * &uu)) * (Expr::int(2) * b).inv(),
                };
                let cs = c * &s;
                let (co, si) = (Expr::cos(&cs), Expr::sin(&cs));
                let (eb, emb) = (Expr::exp(&(b * &s)), Expr::exp(&-(b * &s)));
                let v = &emb * (&zz * &co - &uu * &si);
                let w = if sub == Subcase::J2H0 { yy.clone() } else { &emb * (&zz * &si + &uu * &co) };
                let [f, g, h] = opaque(&[x.clone(), v.clone(), w.clone()]);
                let big_f = match sub {
                    Subcase::J2A => &yy * &f,
                    Subcase::J2H1 => &hpp[0] * &s + f,
                    _ => f,
                };
                let tpl = [big_f, &eb * (&co * &g + &si * &h), &eb * (&co * &h - &si * &g)];
                ([s, v, w], tpl, sigma)
            }
        }
        Subcase::J3Ab | Subcase::J3BH1 | Subcase::J3B => {
            let bi = b.inv();
            let s1 = if sub == Subcase::J3Ab { &h1 * &a.inv() } else { zero() };
            let sigma = [s1, &h2 * &bi - &h3 * &bi * &bi, &h3 * &bi];
            let (yy, zz, uu) = (&y + &sigma[0], &z + &sigma[1], &u + &sigma[2]);
            let s = match sub {
                Subcase::J3Ab => Expr::ln(&yy) * a.inv(),
                Subcase::J3BH1 => &y * &h1.inv(),
                _ => Expr::ln(&uu) * &bi,
            };
            let (eb, emb) = (Expr::exp(&(b * &s)), Expr::exp(&-(b * &s)));
            let v = &emb * (&zz - &uu * &s);
            let w = if sub == Subcase::J3B { yy.clone() } else { &emb * &uu };
            let [f, g, h] = opaque(&[x.clone(), v.clone(), w.clone()]);
            let big_f = match sub {
                Subcase::J3Ab => &yy * &f,
                Subcase::J3BH1 => &hpp[0] * &s + f,
                _ => f,
            };
            let tpl = [big_f, &eb * (&h * &s + g), &eb * &h];
            ([s, v, w], tpl, sigma)
        }
        Subcase::J3AH3 | Subcase::J3A | Subcase::J3H1H3 | Subcase::J3H1 | Subcase::J3H3 | Subcase::J3Zero => {
            let s1 = if matches!(sub, Subcase::J3AH3 | Subcase::J3A) { &h1 * &a.inv() } else { zero() };
            let sigma = [s1, zero(), h2.clone()];
            let (yy, zz, uu) = (&y + &sigma[0], &z + &sigma[1], &u + &sigma[2]);
            let with_h3 = matches!(sub, Subcase::J3AH3 | Subcase::J3H1H3 | Subcase::J3H3);
            let s = match sub {
                Subcase::J3AH3 | Subcase::J3A => Expr::ln(&yy) * a.inv(),
                Subcase::J3H1H3 | Subcase::J3H1 => &y * &h1.inv(),
                Subcase::J3H3 => &uu * &h3.inv(),
                _ => &zz * &uu.inv(),
            };
            let (v, w) = match sub {
                Subcase::J3H3 => (&zz - &uu * &uu * (Expr::int(2) * &h3).inv(), yy.clone()),
                Subcase::J3Zero => (yy.clone(), uu.clone()),
                _ if with_h3 => (&zz - &uu * &s + &half * &h3 * &s * &s, &uu - &h3 * &s),
                _ => (&zz - &uu * &s, uu.clone()),
            };
            let [f, g, h] = opaque(&[x.clone(), v.clone(), w.clone()]);
            let big_f = match sub {
                Subcase::J3AH3 | Subcase::J3A => &yy * &f,
                Subcase::J3H1H3 | Subcase::J3H1 => &hpp[0] * &s + f,
                _ => f,
            };
            let (big_g, big_h) = if with_h3 {
                (&half * &hpp[2] * &s * &s + &h * &s + g, &hpp[2] * &s + h)
            } else {
                (&h * &s + g, h)
            };
            ([s, v, w], [big_f, big_g, big_h], sigma)
        }
        Subcase::J4A => {
            let ai = a.inv();
            let sigma = [
                &h1 * &ai - &h2 * &ai * &ai + &h3 * &ai * &ai * &ai,
                &h2 * &ai - &h3 * &ai * &ai,
                &h3 * &ai,
            ];
            let (yy, zz, uu) = (&y + &sigma[0], &z + &sigma[1], &u + &sigma[2]);
            let s = Expr::ln(&uu) * &ai;
            let ui = uu.inv();
            let v = (&zz - &s * &uu) * &ui;
            let w = (&yy - &s * &zz + &half * &s * &s * &uu) * &ui;
            let [f, g, h] = opaque(&[x.clone(), v.clone(), w.clone()]);
            let tpl = [
                &uu * (&half * &h * &s * &s + &g * &s + f),
                &uu * (&h * &s + g),
                &uu * &h,
            ];
            ([s, v, w], tpl, sigma)
        }
        Subcase::J4H3 | Subcase::J4Zero => {
            let sigma = [zero(), h1.clone(), h2.clone()];
            let (yy, zz, uu) = (y.clone(), &z + &sigma[1], &u + &sigma[2]);
            if sub == Subcase::J4H3 {
                let s = &uu * &h3.inv();
                let v = &zz - &half * &h3 * &s * &s;
                let w = &yy - Expr::frac(1, 6) * &h3 * &s * &s * &s - &v * &s;
                let [f, g, h] = opaque(&[x.clone(), v.clone(), w.clone()]);
                let tpl = [
                    Expr::frac(1, 6) * &hpp[2] * &s * &s * &s + &half * &h * &s * &s + &g * &s + f,
                    &half * &hpp[2] * &s * &s + &h * &s + g,
                    &hpp[2] * &s + h,
                ];
                ([s, v, w], tpl, sigma)
            } else {
                let s = &zz * &uu.inv();
                let w = &yy - &half * &zz * &zz * &uu.inv();
                let [f, g, h] = opaque(&[x.clone(), uu.clone(), w.clone()]);
                let tpl = [&half * &h * &s * &s + &g * &s + f, &h * &s + g, h];
                ([s, uu, w], tpl, sigma)
            }
        }
    };
    let templates = core::array::from_fn(|i| &templates[i] - &sigma[i].diff_n("x", 2));
    let lin = PointGenerator::linear(&p.matrix());
    let generator = PointGenerator {
        xi: Expr::zero(),
        eta: core::array::from_fn(|i| &lin.eta[i] + &data.h[i]),
    };
    Ok(SolutionFamily {
        params: p.clone(),
        branch: Branch::XiZero(sub),
        shift: data.h.clone(),
        invariants,
        templates,
        generator,
    })
}

/// Coefficient symbol `alpha{i}{j}` (1-based).
pub fn alpha(i: usize, j: usize) -> Expr {
    Expr::sym(&alloc::format!("alpha{i}{j}"))
}

/// A `xi != 0` family with `f, g, h` replaced by linear forms in `s, v, w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Linearization {
    /// Coefficients in the symbols `alpha11 .. alpha33`.
    pub system: LinearSystem,
    /// Values of `alpha_ij` that bring `system` to the canonical shape.
    pub normalization: Bindings,
    /// Canonical parameters matching `system` after `normalization`.
    pub params: CanonicalParams,
}

impl Linearization {
    pub fn normalized(&self) -> LinearSystem {
        LinearSystem {
            c: self.system.c.clone().map(|row| row.map(|e| e.subst(&self.normalization).simplify())),
        }
    }
}

pub fn linearize_family(fam: &SolutionFamily) -> Result<Linearization, FamilyError> {
    if fam.branch != Branch::XiNonzero {
        return Err(FamilyError::NotXiNonzero);
    }
    let params = ["_s", "_v", "_w"];
    let mut rhs = fam.templates.clone();
    for (i, name) in FAMILY_FNS.iter().enumerate() {
        let body: Expr = (0..3).map(|j| alpha(i + 1, j + 1) * Expr::sym(params[j])).sum();
        rhs = rhs.map(|e| e.subst_fn(name, &params, &body));
    }
    let c = core::array::from_fn(|i| core::array::from_fn(|j| rhs[i].diff(DEP[j]).simplify()));
    let system = LinearSystem { c };

    let p = &fam.params;
    let al = |i, j| alpha(i, j);
    let mut norm = Bindings::new();
    let cp = match p.kind {
        JordanKind::J1 => {
            norm.insert("alpha12", Expr::one());
            CanonicalParams::from_pairs(
                1,
                [
                    ("a11", al(1, 1)),
                    ("a13", al(1, 3)),
                    ("a21", al(2, 1)),
                    ("a22", al(2, 2)),
                    ("a23", al(2, 3)),
                    ("a31", al(3, 1)),
                    ("a32", al(3, 2)),
                    ("a33", al(3, 3)),
                    ("alpha", &p.a - &p.b),
                    ("beta", &p.a - &p.d),
                ],
            )
        }
        JordanKind::J2 => {
            let s = Expr::sym;
            norm.insert("alpha12", Expr::one());
            norm.insert("alpha13", Expr::zero());
            norm.insert("alpha22", s("beta") + s("c2"));
            norm.insert("alpha23", s("gamma") - s("c1"));
            norm.insert("alpha32", s("gamma") + s("c1"));
            norm.insert("alpha33", s("c2") - s("beta"));
            CanonicalParams::from_pairs(
                2,
                [
                    ("a11", al(1, 1)),
                    ("a21", al(2, 1)),
                    ("a31", al(3, 1)),
                    ("beta", s("beta")),
                    ("gamma", s("gamma")),
                    ("c1", s("c1")),
                    ("c2", s("c2")),
                    ("alpha", &p.a - &p.b),
                    ("c", p.c.clone()),
                ],
            )
        }
        JordanKind::J3 => {
            let mut pairs: Vec<(&str, Expr)> = Vec::new();
            for (k, name) in ["a11", "a12", "a13", "a21", "a22", "a23", "a31", "a32", "a33"].into_iter().enumerate() {
                pairs.push((name, al(k / 3 + 1, k % 3 + 1)));
            }
            pairs.push(("alpha", &p.a - &p.b));
            CanonicalParams::from_pairs(3, pairs)
        }
        JordanKind::J4 => {
            // The printed system is the part of the family where f, g, h
            // depend on s only.
            for n in ["alpha12", "alpha13", "alpha22", "alpha23", "alpha32", "alpha33"] {
                norm.insert(n, Expr::zero());
            }
            CanonicalParams::from_pairs(
                4,
                [("lambda", al(1, 1)), ("beta", al(2, 1)), ("gamma", al(3, 1)), ("alpha", Expr::zero())],
            )
        }
    }
    .expect("parameter names are fixed per case");
    Ok(Linearization { system, normalization: norm, params: cp })
}
