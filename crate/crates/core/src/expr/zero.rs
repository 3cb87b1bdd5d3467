//! Trigonometric rebasing, denominator clearing and zero testing.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::Evaluator;
use super::{rat_gcd, Atom, Expr, FnApp, FnStandIn, Monomial, Value, ValueBindings, Q};

/// Number of sample points in the numeric fallback.
pub const SAMPLES: usize = 64;
/// Relative tolerance in the numeric fallback.
pub const REL_TOL: f64 = 1e-9;
const MAX_REDRAWS: usize = 200;

/// How a zero test was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    /// The normal form is the zero expression.
    Symbolic,
    /// Every sample vanished within tolerance.
    Numeric,
    NonZero,
}

impl ZeroTest {
    pub fn is_zero(self) -> bool {
        !matches!(self, ZeroTest::NonZero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ZeroTestError {
    #[error("no valid sample point found after {0} redraws")]
    EvaluationDomainError(usize),
}

/// True iff `e` is identically zero (see [`zero_test`]).
pub fn is_zero(e: &Expr, seed: u64) -> Result<bool, ZeroTestError> {
    zero_test(e, seed).map(ZeroTest::is_zero)
}

/// Symbolic test first; numeric sampling only when the normal form is
/// inconclusive (transcendental or opaque atoms present).
pub fn zero_test(e: &Expr, seed: u64) -> Result<ZeroTest, ZeroTestError> {
    let s = e.simplify();
    if s.is_zero() {
        return Ok(ZeroTest::Symbolic);
    }
    let c = s.clear_denominators().simplify();
    if c.is_zero() {
        return Ok(ZeroTest::Symbolic);
    }
    let mut only_syms = true;
    c.visit_atoms(&mut |a| only_syms &= matches!(a, Atom::Sym(_)));
    if only_syms {
        return Ok(ZeroTest::NonZero);
    }
    numeric_zero(&c, seed)
}

impl Expr {
    /// Normal form plus trigonometric rebasing, applied recursively to
    /// function arguments.
    pub fn simplify(&self) -> Expr {
        let deep = self
            .map_atoms(&mut |a| simplify_atom_args(a))
            .unwrap_or_else(|| self.clone());
        rebase_trig(&deep)
    }

    /// Multiply through by the smallest monomial that removes all negative
    /// exponents (including reciprocal polynomial factors).
    pub fn clear_denominators(&self) -> Expr {
        let mut mins: BTreeMap<Atom, i32> = BTreeMap::new();
        for t in self.terms() {
            for (a, e) in t.mono.factors() {
                if *e < 0 && !matches!(a, Atom::Exp(_)) {
                    let m = mins.entry(a.clone()).or_insert(0);
                    *m = (*m).min(*e);
                }
            }
        }
        if mins.is_empty() {
            return self.clone();
        }
        // merge at the monomial level so reciprocal factors cancel before
        // the leftover positive powers of polynomials are expanded
        let d = Monomial(mins.into_iter().map(|(a, e)| (a, -e)).collect());
        self.terms()
            .iter()
            .map(|t| Expr::from_raw(t.coeff.clone(), t.mono.merge(&d)))
            .sum()
    }
}

fn simplify_atom_args(a: &Atom) -> Option<Expr> {
    match a {
        Atom::Sym(_) => None,
        Atom::Func(app) => {
            let args: Vec<Expr> = app.args.iter().map(Expr::simplify).collect();
            if args == app.args {
                return None;
            }
            Some(Expr::atom(Atom::Func(Arc::new(FnApp {
                name: app.name.clone(),
                args,
                deriv: app.deriv.clone(),
            }))))
        }
        Atom::Exp(x) | Atom::Sin(x) | Atom::Cos(x) | Atom::Ln(x) | Atom::Base(x) => {
            let y = x.simplify();
            if &y == x.as_ref() {
                return None;
            }
            Some(match a {
                Atom::Exp(_) => Expr::exp(&y),
                Atom::Sin(_) => Expr::sin(&y),
                Atom::Cos(_) => Expr::cos(&y),
                Atom::Ln(_) => Expr::ln(&y),
                _ => y,
            })
        }
    }
}

/// Positive rational content of an expression and the primitive remainder.
fn content(e: &Expr) -> (Q, Expr) {
    let mut g = Q::zero();
    for t in e.terms() {
        g = if g.is_zero() { t.coeff.abs() } else { rat_gcd(&g, &t.coeff) };
    }
    let theta = e.scale(&g.recip());
    (g, theta)
}

/// Rewrite every top-level sin/cos onto the largest common angle of its
/// direction, using multiple-angle formulas.
fn rebase_trig(e: &Expr) -> Expr {
    let mut groups: BTreeMap<Expr, Vec<Q>> = BTreeMap::new();
    for t in e.terms() {
        for (a, _) in t.mono.factors() {
            if let Atom::Sin(x) | Atom::Cos(x) = a {
                let (k, theta) = content(x);
                groups.entry(theta).or_default().push(k);
            }
        }
    }
    let mut base: BTreeMap<Expr, Q> = BTreeMap::new();
    for (theta, ks) in groups {
        let g = ks.iter().skip(1).fold(ks[0].clone(), |g, k| rat_gcd(&g, k));
        if ks.iter().any(|k| *k != g) {
            base.insert(theta, g);
        }
    }
    if base.is_empty() {
        return e.clone();
    }
    e.map_atoms(&mut |a| {
        let (is_sin, x) = match a {
            Atom::Sin(x) => (true, x),
            Atom::Cos(x) => (false, x),
            _ => return None,
        };
        let (k, theta) = content(x);
        let g = base.get(&theta)?;
        let m = (k / g).to_integer();
        let m: u32 = m.try_into().ok()?;
        if m == 1 {
            return None;
        }
        let phi = theta.scale(g);
        let (c, s) = multiple_angle(&Expr::cos(&phi), &Expr::sin(&phi), m);
        Some(if is_sin { s } else { c })
    })
    .unwrap_or_else(|| e.clone())
}

/// (cos mφ, sin mφ) from (cos φ, sin φ).
fn multiple_angle(c1: &Expr, s1: &Expr, m: u32) -> (Expr, Expr) {
    let (mut c, mut s) = (c1.clone(), s1.clone());
    for _ in 1..m {
        let nc = &(&c * c1) - &(&s * s1);
        let ns = &(&s * c1) + &(&c * s1);
        c = nc;
        s = ns;
    }
    (c, s)
}

fn draw_rational(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let n: i64 = rng.gen_range(-97..=97);
        let d: i64 = rng.gen_range(-97..=97);
        if d != 0 {
            return Q::new(n.into(), d.into());
        }
    }
}

fn draw_small(rng: &mut ChaCha8Rng) -> Expr {
    let n: i64 = rng.gen_range(-5..=5);
    let d: i64 = rng.gen_range(1..=4);
    Expr::frac(n, d)
}

/// Random smooth stand-in: a quadratic plus the sine of a linear form.
fn stand_in(rng: &mut ChaCha8Rng, arity: usize) -> FnStandIn {
    let names: Vec<String> = (0..arity).map(|i| alloc::format!("_p{i}")).collect();
    let vars: Vec<Expr> = names.iter().map(|n| Expr::sym(n)).collect();
    let mut body = draw_small(rng);
    let mut lin = Expr::zero();
    for i in 0..arity {
        body = body + draw_small(rng) * &vars[i];
        lin = lin + draw_small(rng) * &vars[i];
        for j in i..arity {
            body = body + draw_small(rng) * &vars[i] * &vars[j];
        }
    }
    body = body + draw_small(rng) * Expr::sin(&lin);
    let params: Vec<&str> = names.iter().map(String::as_str).collect();
    FnStandIn::new(&params, body)
}

fn numeric_zero(e: &Expr, seed: u64) -> Result<ZeroTest, ZeroTestError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let syms: BTreeSet<_> = e.free_symbols();
    let mut funcs: BTreeMap<Arc<str>, usize> = BTreeMap::new();
    e.visit_atoms(&mut |a| {
        if let Atom::Func(app) = a {
            funcs.insert(app.name.clone(), app.args.len());
        }
    });
    let mut base = ValueBindings::new();
    for (name, arity) in &funcs {
        base.set_function(name, stand_in(&mut rng, *arity));
    }
    let mut redraws = 0;
    let mut done = 0;
    while done < SAMPLES {
        let mut b = base.clone();
        for s in &syms {
            b.set(s, Value::Exact(draw_rational(&mut rng)));
        }
        match sample(e, &b) {
            Some(Sample::Zero) => done += 1,
            Some(Sample::NonZero) => return Ok(ZeroTest::NonZero),
            None => {
                redraws += 1;
                if redraws > MAX_REDRAWS {
                    return Err(ZeroTestError::EvaluationDomainError(redraws));
                }
            }
        }
    }
    Ok(ZeroTest::Numeric)
}

enum Sample {
    Zero,
    NonZero,
}

fn sample(e: &Expr, b: &ValueBindings) -> Option<Sample> {
    let mut ev = Evaluator::new(b);
    let mut exact = Q::zero();
    let mut sum = 0.0f64;
    let mut scale = 0.0f64;
    let mut all_exact = true;
    for t in e.terms() {
        match ev.eval_term(&t.coeff, t.mono.factors()).ok()? {
            Value::Exact(v) => {
                let f = num_traits::ToPrimitive::to_f64(&v).unwrap_or(f64::NAN);
                scale += f.abs();
                sum += f;
                exact += v;
            }
            Value::Float(f) => {
                all_exact = false;
                scale += f.abs();
                sum += f;
            }
        }
    }
    if all_exact {
        return Some(if exact.is_zero() { Sample::Zero } else { Sample::NonZero });
    }
    if !sum.is_finite() || !scale.is_finite() {
        return None;
    }
    Some(if sum.abs() <= REL_TOL * scale { Sample::Zero } else { Sample::NonZero })
}
