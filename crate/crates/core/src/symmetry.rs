//! Point generators, second prolongation and determining-equation residuals
//! for systems `y'' = F, z'' = G, u'' = H` in the unknowns `y, z, u` of `x`.
//!
//! A generator `X = xi d/dx + eta1 d/dy + eta2 d/dz + eta3 d/du` stores the
//! full coefficient of `d/dx` in `xi`. (Some texts write it as `2 xi`.)

use alloc::string::String;
use alloc::vec::Vec;

use crate::expr::{zero_test, Expr, ZeroTest, ZeroTestError};

/// Dependent variables.
pub const DEP: [&str; 3] = ["y", "z", "u"];
/// First-derivative symbols used inside prolongation.
pub const DEP1: [&str; 3] = ["yp", "zp", "up"];
/// Second-derivative symbols used inside prolongation.
pub const DEP2: [&str; 3] = ["ypp", "zpp", "upp"];

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SymmetryError {
    #[error("xi must depend on x only, found `{0}`")]
    XiDependsOnDependent(String),
    #[error("system right-hand side mentions derivative symbol `{0}`")]
    DerivativeInSystem(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointGenerator {
    pub xi: Expr,
    pub eta: [Expr; 3],
}

impl PointGenerator {
    pub fn new(xi: Expr, eta: [Expr; 3]) -> Result<Self, SymmetryError> {
        for v in DEP.iter().chain(&DEP1).chain(&DEP2) {
            if xi.contains_symbol(v) {
                return Err(SymmetryError::XiDependsOnDependent(String::from(*v)));
            }
        }
        Ok(PointGenerator { xi, eta })
    }

    /// `d/dx`.
    pub fn translation() -> Self {
        PointGenerator {
            xi: Expr::one(),
            eta: [Expr::zero(), Expr::zero(), Expr::zero()],
        }
    }

    /// `y d/dy + z d/dz + u d/du`.
    pub fn scaling() -> Self {
        PointGenerator {
            xi: Expr::zero(),
            eta: DEP.map(Expr::sym),
        }
    }

    /// `(A y) . grad` for a matrix of expressions.
    pub fn linear(a: &[[Expr; 3]; 3]) -> Self {
        let y = DEP.map(Expr::sym);
        PointGenerator {
            xi: Expr::zero(),
            eta: core::array::from_fn(|i| (0..3).map(|j| &a[i][j] * &y[j]).sum()),
        }
    }

    pub fn scale(&self, c: &Expr) -> Self {
        PointGenerator {
            xi: &self.xi * c,
            eta: self.eta.clone().map(|e| &e * c),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        PointGenerator {
            xi: &self.xi + &o.xi,
            eta: core::array::from_fn(|i| &self.eta[i] + &o.eta[i]),
        }
    }

    /// Apply the generator (as a derivation) to a function of `x, y, z, u`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let mut out = &self.xi * &f.diff("x");
        for (i, v) in DEP.iter().enumerate() {
            if !self.eta[i].is_zero() {
                out = out + &self.eta[i] * &f.diff(v);
            }
        }
        out
    }

    /// True when every `eta` is affine in `y, z, u`.
    pub fn is_linear_ansatz(&self) -> bool {
        self.eta.iter().all(|e| {
            DEP.iter().all(|v| {
                let d = e.diff(v);
                DEP.iter().all(|w| d.diff(w).is_zero())
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SecondOrderSystem {
    pub rhs: [Expr; 3],
}

impl SecondOrderSystem {
    pub fn new(rhs: [Expr; 3]) -> Result<Self, SymmetryError> {
        for e in &rhs {
            for v in DEP1.iter().chain(&DEP2) {
                if e.contains_symbol(v) {
                    return Err(SymmetryError::DerivativeInSystem(String::from(*v)));
                }
            }
        }
        Ok(SecondOrderSystem { rhs })
    }

    pub fn free_particle() -> Self {
        SecondOrderSystem {
            rhs: [Expr::zero(), Expr::zero(), Expr::zero()],
        }
    }
}

/// Total derivative in `x` on the second-order jet.
pub fn total_derivative(f: &Expr) -> Expr {
    let mut out = f.diff("x");
    for i in 0..3 {
        out = out + Expr::sym(DEP1[i]) * f.diff(DEP[i]) + Expr::sym(DEP2[i]) * f.diff(DEP1[i]);
    }
    out
}

/// First and second prolongation coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Prolongation {
    pub first: [Expr; 3],
    pub second: [Expr; 3],
}

pub fn prolong2(x: &PointGenerator) -> Prolongation {
    let dxi = total_derivative(&x.xi);
    let first: [Expr; 3] = core::array::from_fn(|i| total_derivative(&x.eta[i]) - Expr::sym(DEP1[i]) * &dxi);
    let second = core::array::from_fn(|i| total_derivative(&first[i]) - Expr::sym(DEP2[i]) * &dxi);
    Prolongation { first, second }
}

/// `zeta2_i - X(F_i)` with second derivatives replaced by the system.
pub fn determining_residual(x: &PointGenerator, s: &SecondOrderSystem) -> [Expr; 3] {
    let pr = prolong2(x);
    let mut on_shell = crate::expr::Bindings::new();
    for i in 0..3 {
        on_shell.insert(DEP2[i], s.rhs[i].clone());
    }
    core::array::from_fn(|i| (pr.second[i].subst(&on_shell) - x.apply(&s.rhs[i])).simplify())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Admission {
    pub admitted: bool,
    pub residuals: [Expr; 3],
    pub tests: [ZeroTest; 3],
}

impl Admission {
    /// All residuals vanished in normal form, without sampling.
    pub fn symbolic(&self) -> bool {
        self.tests.iter().all(|t| *t == ZeroTest::Symbolic)
    }
}

pub fn check_admitted(x: &PointGenerator, s: &SecondOrderSystem, seed: u64) -> Result<Admission, ZeroTestError> {
    let residuals = determining_residual(x, s);
    let mut tests = [ZeroTest::Symbolic; 3];
    for i in 0..3 {
        tests[i] = zero_test(&residuals[i], seed.wrapping_add(i as u64))?;
    }
    Ok(Admission {
        admitted: tests.iter().all(|t| t.is_zero()),
        residuals,
        tests,
    })
}

/// Names of the opaque functions `zeta1(x), zeta2(x), zeta3(x)`.
pub const ZETA: [&str; 3] = ["zeta1", "zeta2", "zeta3"];

/// `zeta1(x) d/dy + zeta2(x) d/dz + zeta3(x) d/du` with opaque `zeta_i`.
pub fn superposition_template() -> PointGenerator {
    PointGenerator {
        xi: Expr::zero(),
        eta: ZETA.map(|n| Expr::func(n, alloc::vec![Expr::sym("x")])),
    }
}

/// `zeta_i'' - sum_j c_ij zeta_j` for the template generator.
pub fn superposition_constraints(c: &[[Expr; 3]; 3]) -> [Expr; 3] {
    let zeta: Vec<Expr> = ZETA.iter().map(|n| Expr::func(n, alloc::vec![Expr::sym("x")])).collect();
    core::array::from_fn(|i| {
        let mut e = zeta[i].diff_n("x", 2);
        for j in 0..3 {
            e = e - &c[i][j] * &zeta[j];
        }
        e
    })
}
