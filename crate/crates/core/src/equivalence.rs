//! Equivalence transformations of `y'' = F(x, y)`:
//!
//! * `y~ = P y` with a constant nonsingular `P`;
//! * `y~ = y + phi(x)`;
//! * `x~ = phi(x), y~ = psi(x) y` with `phi'' psi = 2 phi' psi'`.
//!
//! New variables reuse the names `x, y, z, u`. A reparametrization needs
//! `phi^-1` in closed form; affine, Moebius and `k ln(x + e) + m` maps are
//! inverted.

use crate::expr::{zero_test, Bindings, EvalError, Expr, Q, ValueBindings};
use crate::linalg::RatMatrix3;
use crate::symmetry::{PointGenerator, SecondOrderSystem, DEP};

/// Seed for the zero tests run inside transformations.
const SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EquivalenceError {
    #[error("matrix is singular")]
    Singular,
    #[error("phi' psi vanishes identically")]
    DegenerateReparam,
    #[error("phi'' psi - 2 phi' psi' does not vanish")]
    ReparamConstraintViolated,
    #[error("phi is not monotone on the working domain")]
    NonInvertibleOnDomain,
    #[error("no closed-form inverse for phi = {0}")]
    UnsupportedReparam(alloc::string::String),
    #[error("unsupported coefficients: {0}")]
    UnsupportedCoefficients(&'static str),
    #[error("zero test failed: {0}")]
    ZeroTest(#[from] crate::expr::ZeroTestError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum EquivalenceTransform {
    LinearChange(RatMatrix3),
    Shift([Expr; 3]),
    Reparam { phi: Expr, psi: Expr },
}

impl EquivalenceTransform {
    pub fn linear(p: RatMatrix3) -> Result<Self, EquivalenceError> {
        if p.det() == crate::expr::q(0) {
            return Err(EquivalenceError::Singular);
        }
        Ok(EquivalenceTransform::LinearChange(p))
    }

    pub fn shift(phi: [Expr; 3]) -> Self {
        EquivalenceTransform::Shift(phi)
    }

    /// Checks `phi' psi != 0`, the constraint, and the domain.
    pub fn reparam(phi: Expr, psi: Expr) -> Result<Self, EquivalenceError> {
        let d1 = phi.diff("x");
        if (&d1 * &psi).simplify().is_zero() {
            return Err(EquivalenceError::DegenerateReparam);
        }
        if !zero_test(&reparam_defect(&phi, &psi), SEED)?.is_zero() {
            return Err(EquivalenceError::ReparamConstraintViolated);
        }
        check_monotone(&d1)?;
        Ok(EquivalenceTransform::Reparam { phi, psi })
    }

    pub fn identity() -> Self {
        EquivalenceTransform::LinearChange(RatMatrix3::identity())
    }
}

fn reparam_defect(phi: &Expr, psi: &Expr) -> Expr {
    let d1 = phi.diff("x");
    &d1.diff("x") * psi - Expr::int(2) * &d1 * &psi.diff("x")
}

/// `phi'' psi - 2 phi' psi'` vanishes.
pub fn check_reparam(phi: &Expr, psi: &Expr) -> bool {
    zero_test(&reparam_defect(phi, psi), SEED).is_ok_and(|t| t.is_zero())
}

/// Sample points of the working domain `[1/2, 2]`.
pub fn domain_points() -> impl Iterator<Item = Q> {
    (0..16).map(|k| Q::new((8 + 2 * k).into(), 16.into()))
}

/// `phi'` keeps one sign on the domain. Skipped when `phi` has free
/// parameters besides `x`.
fn check_monotone(d1: &Expr) -> Result<(), EquivalenceError> {
    let mut sign = 0i8;
    for p in domain_points() {
        let b = ValueBindings::new().with_q("x", p);
        let v = match d1.evaluate(&b) {
            Ok(v) => v.to_f64(),
            Err(EvalError::UnboundSymbol(_)) | Err(EvalError::UnboundFunction(_)) => return Ok(()),
            Err(_) => return Err(EquivalenceError::NonInvertibleOnDomain),
        };
        let s = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        };
        if s == 0 || (sign != 0 && s != sign) || !v.is_finite() {
            return Err(EquivalenceError::NonInvertibleOnDomain);
        }
        sign = s;
    }
    Ok(())
}

/// `e` as an expression free of `x`, if it is constant.
fn constant_value(e: &Expr) -> Option<Expr> {
    let e = e.simplify();
    if !e.contains_symbol("x") {
        return Some(e);
    }
    if !zero_test(&e.diff("x"), SEED).ok()?.is_zero() {
        return None;
    }
    [Q::new(7919.into(), 104729.into()), Q::new(3.into(), 7.into())]
        .into_iter()
        .find_map(|p| e.try_subst(&Bindings::new().with("x", Expr::rational(p))))
        .map(|v| v.simplify())
}

/// `phi^-1` as an expression in `x`.
pub fn invert_phi(phi: &Expr) -> Result<Expr, EquivalenceError> {
    let x = Expr::sym("x");
    let unsupported = || EquivalenceError::UnsupportedReparam(phi.render());
    let d1 = phi.diff("x").simplify();
    if d1.is_zero() {
        return Err(EquivalenceError::DegenerateReparam);
    }
    let d2 = d1.diff("x").simplify();
    if d2.is_zero() {
        let p = constant_value(&d1).ok_or_else(unsupported)?;
        let q = constant_value(&(phi - &p * &x)).ok_or_else(unsupported)?;
        return Ok((&x - &q) * p.inv());
    }
    let ratio = d1.try_div(&d2).ok_or_else(unsupported)?;
    // Moebius: phi'/phi'' = -(x + e)/2.
    if let Some(e) = constant_value(&(-&x - Expr::int(2) * &ratio)) {
        let m = (phi * &(&x + &e)).simplify();
        if let Some(a) = constant_value(&m.diff("x")) {
            if let Some(b) = constant_value(&(&m - &a * &x)) {
                return (&b - &e * &x).try_div(&(&x - &a)).ok_or_else(unsupported);
            }
        }
    }
    // k ln(x + e) + m: phi'/phi'' = -(x + e).
    if let Some(e) = constant_value(&(-&x - &ratio)) {
        let xe = &x + &e;
        if let Some(k) = constant_value(&(&d1 * &xe)) {
            if let Some(m) = constant_value(&(phi - &k * Expr::ln(&xe))) {
                return Ok(Expr::exp(&((&x - &m) * k.inv())) - e);
            }
        }
    }
    Err(unsupported())
}

fn rat_matrix_expr(p: &RatMatrix3) -> [[Expr; 3]; 3] {
    core::array::from_fn(|i| core::array::from_fn(|j| Expr::rational(p.0[i][j].clone())))
}

/// `y -> M y` as bindings.
fn linear_bindings(m: &RatMatrix3) -> Bindings {
    let me = rat_matrix_expr(m);
    let y = DEP.map(Expr::sym);
    let mut b = Bindings::new();
    for i in 0..3 {
        b.insert(DEP[i], (0..3).map(|j| &me[i][j] * &y[j]).sum());
    }
    b
}

fn mat_vec(m: &RatMatrix3, v: &[Expr; 3]) -> [Expr; 3] {
    let me = rat_matrix_expr(m);
    core::array::from_fn(|i| (0..3).map(|j| &me[i][j] * &v[j]).sum())
}

/// `y -> y / psi, x -> phi^-1(x)` as two successive bindings.
fn reparam_bindings(phi: &Expr, psi: &Expr) -> Result<(Bindings, Bindings), EquivalenceError> {
    let inv = invert_phi(phi)?;
    let psi_inv = psi.inv();
    let mut scale = Bindings::new();
    for v in DEP {
        scale.insert(v, Expr::sym(v) * &psi_inv);
    }
    Ok((scale, Bindings::new().with("x", inv)))
}

pub fn transform_system(t: &EquivalenceTransform, s: &SecondOrderSystem) -> Result<SecondOrderSystem, EquivalenceError> {
    let rhs = match t {
        EquivalenceTransform::LinearChange(p) => {
            let pinv = p.inverse().ok_or(EquivalenceError::Singular)?;
            let b = linear_bindings(&pinv);
            mat_vec(p, &s.rhs.clone().map(|e| e.subst(&b)))
        }
        EquivalenceTransform::Shift(phi) => {
            let mut b = Bindings::new();
            for i in 0..3 {
                b.insert(DEP[i], Expr::sym(DEP[i]) - &phi[i]);
            }
            core::array::from_fn(|i| s.rhs[i].subst(&b) + phi[i].diff_n("x", 2))
        }
        EquivalenceTransform::Reparam { phi, psi } => {
            let (d1, dpsi) = (phi.diff("x"), psi.diff("x"));
            let (d2, ddpsi) = (d1.diff("x"), dpsi.diff("x"));
            // Coefficient of y' in the chain rule; it must cancel.
            let first = Expr::int(2) * &dpsi * &d1 - psi * &d2;
            if !zero_test(&first, SEED)?.is_zero() {
                return Err(EquivalenceError::ReparamConstraintViolated);
            }
            let (scale, to_new) = reparam_bindings(phi, psi)?;
            let denom = d1.pow(3).inv();
            core::array::from_fn(|i| {
                let y = Expr::sym(DEP[i]);
                let old = (&s.rhs[i] * psi + &y * &ddpsi) * &d1 - &y * &dpsi * &d2;
                (old * &denom).subst(&scale).subst(&to_new).simplify()
            })
        }
    };
    Ok(SecondOrderSystem { rhs: rhs.map(|e| e.simplify()) })
}

/// The generator in the new variables.
pub fn pushforward(t: &EquivalenceTransform, g: &PointGenerator) -> Result<PointGenerator, EquivalenceError> {
    let out = match t {
        EquivalenceTransform::LinearChange(p) => {
            let pinv = p.inverse().ok_or(EquivalenceError::Singular)?;
            let b = linear_bindings(&pinv);
            PointGenerator {
                xi: g.xi.clone(),
                eta: mat_vec(p, &g.eta.clone().map(|e| e.subst(&b))),
            }
        }
        EquivalenceTransform::Shift(phi) => {
            let mut b = Bindings::new();
            for i in 0..3 {
                b.insert(DEP[i], Expr::sym(DEP[i]) - &phi[i]);
            }
            PointGenerator {
                xi: g.xi.clone(),
                eta: core::array::from_fn(|i| (&g.eta[i] + &g.xi * &phi[i].diff("x")).subst(&b)),
            }
        }
        EquivalenceTransform::Reparam { phi, psi } => {
            let (scale, to_new) = reparam_bindings(phi, psi)?;
            let dpsi = psi.diff("x");
            let conv = |e: Expr| e.subst(&scale).subst(&to_new).simplify();
            PointGenerator {
                xi: conv(&g.xi * &phi.diff("x")),
                eta: core::array::from_fn(|i| conv(&g.eta[i] * psi + Expr::sym(DEP[i]) * &dpsi * &g.xi)),
            }
        }
    };
    Ok(PointGenerator {
        xi: out.xi.simplify(),
        eta: out.eta.map(|e| e.simplify()),
    })
}

/// `T2 o T1` for two linear changes.
pub fn compose_linear(t2: &RatMatrix3, t1: &RatMatrix3) -> RatMatrix3 {
    t2.mul(t1)
}

/// A generator with `xi != 0` brought to `k (d/dx + (A y) . grad)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization {
    /// Applied in order.
    pub transforms: alloc::vec::Vec<EquivalenceTransform>,
    /// Constant `k`; the pushed-forward generator is `k` times `generator`.
    pub k: Expr,
    pub a: [[Expr; 3]; 3],
    /// `d/dx + (A y) . grad`.
    pub generator: PointGenerator,
}

/// Shift, then reparametrize, so that `xi` is constant and `eta` linear.
///
/// `xi` must be constant, linear, or a constant times a square; the shift
/// ODEs are solved by a polynomial ansatz with exact elimination.
pub fn normalize_generator(g: &PointGenerator) -> Result<Normalization, EquivalenceError> {
    let x = Expr::sym("x");
    let xi = g.xi.simplify();
    if xi.is_zero() {
        return Err(EquivalenceError::UnsupportedCoefficients("xi vanishes"));
    }
    if !g.is_linear_ansatz() {
        return Err(EquivalenceError::UnsupportedCoefficients("eta is not affine in y, z, u"));
    }
    let half_dxi = xi.diff("x") * Expr::frac(1, 2);
    let mut kmat: [[Expr; 3]; 3] = Default::default();
    for i in 0..3 {
        for j in 0..3 {
            let mut e = g.eta[i].diff(DEP[j]);
            if i == j {
                e = e - &half_dxi;
            }
            let e = e.simplify();
            if e.contains_symbol("x") {
                return Err(EquivalenceError::UnsupportedCoefficients("k_ij must be constant"));
            }
            kmat[i][j] = e;
        }
    }
    let origin = DEP.iter().fold(Bindings::new(), |b, v| b.with(v, Expr::zero()));
    let zeta: [Expr; 3] = core::array::from_fn(|i| g.eta[i].subst(&origin).simplify());

    let mut transforms = alloc::vec::Vec::new();
    if zeta.iter().any(|z| !z.is_zero()) {
        let phi = solve_shift(&xi, &kmat, &zeta)?;
        transforms.push(EquivalenceTransform::Shift(phi));
    }

    let k = match xi.poly_coeffs("x").as_deref() {
        _ if !xi.contains_symbol("x") => xi.clone(),
        Some([q, p]) => {
            let e = Expr::rational(q / p);
            let xe = &x + &e;
            let phi = Expr::ln(&xe);
            let psi = Expr::exp(&(Expr::frac(-1, 2) * Expr::ln(&xe)));
            transforms.push(reparam_step(&xi, phi, psi)?);
            Expr::rational(p.clone())
        }
        Some([c0, c1, c2]) if c1 * c1 == Q::from_integer(4.into()) * c0 * c2 => {
            let e = Expr::rational(c1 / (Q::from_integer(2.into()) * c2));
            let inv = (&x + &e).inv();
            transforms.push(reparam_step(&xi, -inv.clone(), inv)?);
            Expr::rational(c2.clone())
        }
        _ => {
            return Err(EquivalenceError::UnsupportedCoefficients(
                "xi must be constant, linear, or a constant times a square",
            ))
        }
    };
    let kinv = k.inv();
    let a = kmat.map(|row| row.map(|e| (&e * &kinv).simplify()));
    let generator = PointGenerator {
        xi: Expr::one(),
        eta: PointGenerator::linear(&a).eta,
    };
    Ok(Normalization { transforms, k, a, generator })
}

/// Reparametrization with `phi' = psi^2`; checks that `xi phi'` is constant.
fn reparam_step(xi: &Expr, phi: Expr, psi: Expr) -> Result<EquivalenceTransform, EquivalenceError> {
    if !zero_test(&(xi * &phi.diff("x")).diff("x"), SEED)?.is_zero() {
        return Err(EquivalenceError::UnsupportedCoefficients("xi phi' is not constant"));
    }
    EquivalenceTransform::reparam(phi, psi)
}

/// Polynomial `phi` with `xi phi' - (xi'/2 + K) phi + zeta = 0`.
fn solve_shift(xi: &Expr, k: &[[Expr; 3]; 3], zeta: &[Expr; 3]) -> Result<[Expr; 3], EquivalenceError> {
    let bad = || EquivalenceError::UnsupportedCoefficients("shift equations need polynomial xi, zeta and rational k_ij");
    let xi_c = xi.poly_coeffs("x").ok_or_else(bad)?;
    let zeta_c: alloc::vec::Vec<_> = zeta.iter().map(|z| z.poly_coeffs("x").ok_or_else(bad)).collect::<Result<_, _>>()?;
    for row in k {
        for e in row {
            e.as_rational().ok_or_else(bad)?;
        }
    }
    let x = Expr::sym("x");
    let half_dxi = xi.diff("x") * Expr::frac(1, 2);
    let deg = zeta_c.iter().map(|c| c.len()).max().unwrap_or(0) + xi_c.len() + 2;
    let rows = 3 * (deg + xi_c.len() + 1);
    let unknowns = 3 * (deg + 1);
    let coeff_at = |e: &Expr, m: usize| -> Q {
        e.poly_coeffs("x").and_then(|c| c.get(m).cloned()).unwrap_or_else(|| crate::expr::q(0))
    };
    // Column for phi = x^n e_j.
    let mut a = alloc::vec![alloc::vec![crate::expr::q(0); unknowns]; rows];
    for j in 0..3 {
        for n in 0..=deg {
            let basis = x.pow(n as i64);
            for i in 0..3 {
                let mut l = &k[i][j] * &basis;
                if i == j {
                    l = &half_dxi * &basis + l - xi * &basis.diff("x");
                }
                let l = l.simplify();
                for m in 0..rows / 3 {
                    a[i * (rows / 3) + m][j * (deg + 1) + n] = coeff_at(&l, m);
                }
            }
        }
    }
    let mut b = alloc::vec![crate::expr::q(0); rows];
    for i in 0..3 {
        for m in 0..rows / 3 {
            b[i * (rows / 3) + m] = zeta_c[i].get(m).cloned().unwrap_or_else(|| crate::expr::q(0));
        }
    }
    let sol = crate::linalg::solve(&a, &b).ok_or(EquivalenceError::UnsupportedCoefficients(
        "shift equations have no polynomial solution",
    ))?;
    Ok(core::array::from_fn(|j| {
        (0..=deg).map(|n| Expr::rational(sol[j * (deg + 1) + n].clone()) * x.pow(n as i64)).sum()
    }))
}
