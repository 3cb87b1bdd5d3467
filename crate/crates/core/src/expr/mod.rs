//! Expression trees over exact rationals.
//!
//! An [`Expr`] is always kept in a structural normal form: a sorted sum of
//! terms, each term a rational coefficient times a [`Monomial`] (a sorted
//! product of [`Atom`]s raised to integer powers). The arithmetic
//! constructors maintain the following rules eagerly:
//!
//! * sums are flattened and like terms are merged; a zero sum has no terms;
//! * positive integer powers of sums are expanded, negative powers of sums
//!   become a `Base` atom holding a primitive polynomial;
//! * a monomial carries at most one `exp` atom: `exp(A)*exp(B) = exp(A+B)`,
//!   and `exp(n*ln(Q)) = Q^n` for integer `n`;
//! * `sin(t)^2` is rewritten to `1 - cos(t)^2`;
//! * `sin`/`cos` arguments have a positive leading coefficient.
//!
//! [`Expr::simplify`] additionally rewrites trigonometric atoms that share an
//! argument direction onto a common angle (`cos(2t)` becomes `2cos(t)^2-1`),
//! which the structural constructors cannot do locally.

mod diff;
mod eval;
mod parse;
mod render;
mod subst;
mod zero;

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use eval::{EvalError, FnStandIn, Value, ValueBindings};
pub use parse::{parse, parse_with, ParseError};
pub use subst::Bindings;
pub use zero::{is_zero, zero_test, ZeroTest, ZeroTestError};

/// Exact rational coefficient.
pub type Q = BigRational;

/// Interned symbol name.
pub type Symbol = Arc<str>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn symbol(name: &str) -> Symbol {
    Arc::from(name)
}

/// Elementary function heads understood by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Head {
    Exp,
    Sin,
    Cos,
    Ln,
}

impl Head {
    pub fn name(self) -> &'static str {
        match self {
            Head::Exp => "exp",
            Head::Sin => "sin",
            Head::Cos => "cos",
            Head::Ln => "ln",
        }
    }

    pub fn from_name(name: &str) -> Option<Head> {
        match name {
            "exp" => Some(Head::Exp),
            "sin" => Some(Head::Sin),
            "cos" => Some(Head::Cos),
            "ln" => Some(Head::Ln),
            _ => None,
        }
    }
}

/// Application of an opaque (arbitrary) function, possibly differentiated.
///
/// `deriv[i]` counts partial derivatives with respect to argument `i`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct FnApp {
    pub name: Symbol,
    pub args: Vec<Expr>,
    pub deriv: Vec<u32>,
}

#[derive(Clone, Debug)]
pub enum Atom {
    Sym(Symbol),
    Func(Arc<FnApp>),
    Exp(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    Ln(Arc<Expr>),
    /// A primitive multi-term polynomial; only ever carries negative exponents.
    Base(Arc<Expr>),
}

impl Atom {
    fn rank(&self) -> u8 {
        match self {
            Atom::Sym(_) => 0,
            Atom::Func(_) => 1,
            Atom::Exp(_) => 2,
            Atom::Sin(_) => 3,
            Atom::Cos(_) => 4,
            Atom::Ln(_) => 5,
            Atom::Base(_) => 6,
        }
    }

    /// Argument of a unary atom.
    pub fn arg(&self) -> Option<&Expr> {
        match self {
            Atom::Exp(a) | Atom::Sin(a) | Atom::Cos(a) | Atom::Ln(a) | Atom::Base(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_transcendental(&self) -> bool {
        !matches!(self, Atom::Sym(_) | Atom::Base(_))
    }
}

fn cmp_arc<T: Ord>(a: &Arc<T>, b: &Arc<T>) -> Ordering {
    if Arc::ptr_eq(a, b) {
        Ordering::Equal
    } else {
        a.as_ref().cmp(b.as_ref())
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Atom::Sym(a), Atom::Sym(b)) => a.cmp(b),
            (Atom::Func(a), Atom::Func(b)) => cmp_arc(a, b),
            (Atom::Exp(a), Atom::Exp(b))
            | (Atom::Sin(a), Atom::Sin(b))
            | (Atom::Cos(a), Atom::Cos(b))
            | (Atom::Ln(a), Atom::Ln(b))
            | (Atom::Base(a), Atom::Base(b)) => cmp_arc(a, b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Atom {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Atom {}

/// Sorted product of atoms with nonzero integer exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Monomial(Vec<(Atom, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn factors(&self) -> &[(Atom, i32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    fn from_sorted(v: Vec<(Atom, i32)>) -> Self {
        Monomial(v)
    }

    /// Merge two sorted factor lists, adding exponents; zero exponents drop out.
    fn merge(&self, other: &Monomial) -> Vec<(Atom, i32)> {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = a[i].1 + b[j].1;
                    if e != 0 {
                        out.push((a[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        out
    }

    fn needs_fixup(v: &[(Atom, i32)]) -> bool {
        let mut exps = 0;
        for (a, e) in v {
            match a {
                Atom::Exp(_) => {
                    exps += 1;
                    if *e != 1 || exps > 1 {
                        return true;
                    }
                }
                Atom::Sin(_) if *e >= 2 => return true,
                Atom::Base(_) if *e > 0 => return true,
                _ => {}
            }
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Term {
    pub mono: Monomial,
    pub coeff: Q,
}

/// Normalized symbolic expression.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Expr {
    terms: Vec<Term>,
}

/// Tree view of a normalized expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Rational(Q),
    Symbol(Symbol),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    IntPow(Expr, i64),
    Apply(Head, Expr),
    Opaque {
        name: Symbol,
        args: Vec<Expr>,
        deriv: Vec<u32>,
    },
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Expr::rational(Q::one())
    }

    pub fn int(n: i64) -> Self {
        Expr::rational(q(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::rational(q_frac(n, d))
    }

    pub fn rational(c: Q) -> Self {
        if c.is_zero() {
            Expr::zero()
        } else {
            Expr {
                terms: alloc::vec![Term {
                    mono: Monomial::one(),
                    coeff: c,
                }],
            }
        }
    }

    pub fn sym(name: &str) -> Self {
        Expr::atom(Atom::Sym(symbol(name)))
    }

    pub fn symbol(s: &Symbol) -> Self {
        Expr::atom(Atom::Sym(s.clone()))
    }

    fn atom(a: Atom) -> Self {
        Expr::from_monomial(Q::one(), Monomial(alloc::vec![(a, 1)]))
    }

    fn from_monomial(c: Q, m: Monomial) -> Self {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: alloc::vec![Term { mono: m, coeff: c }],
        }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|c| c.is_one())
    }

    /// The value if this is a rational constant.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [t] if t.mono.is_one() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self.terms.as_slice() {
            [t] if t.coeff.is_one() => match t.mono.0.as_slice() {
                [(Atom::Sym(s), 1)] => Some(s),
                _ => None,
            },
            _ => None,
        }
    }

    /// Build from unsorted terms, merging like monomials.
    pub(crate) fn from_terms(mut terms: Vec<Term>) -> Self {
        if terms.len() <= 1 {
            terms.retain(|t| !t.coeff.is_zero());
            return Expr { terms };
        }
        terms.sort_by(|a, b| a.mono.cmp(&b.mono));
        let mut out: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(last) = out.last_mut() {
                if last.mono == t.mono {
                    last.coeff += t.coeff;
                    continue;
                }
            }
            out.push(t);
        }
        out.retain(|t| !t.coeff.is_zero());
        Expr { terms: out }
    }

    /// Canonicalize a raw factor list into an expression.
    fn from_raw(coeff: Q, raw: Vec<(Atom, i32)>) -> Expr {
        if !Monomial::needs_fixup(&raw) {
            return Expr::from_monomial(coeff, Monomial::from_sorted(raw));
        }
        let mut plain = Vec::with_capacity(raw.len());
        let mut exp_arg = Expr::zero();
        let mut extra: Vec<Expr> = Vec::new();
        for (a, e) in raw {
            match &a {
                Atom::Exp(arg) => {
                    exp_arg = &exp_arg + &arg.scale(&q(e as i64));
                }
                Atom::Sin(_) if e >= 2 => {
                    let s_part = if e % 2 == 1 { 1 } else { 0 };
                    if s_part == 1 {
                        plain.push((a.clone(), 1));
                    }
                    let cos_atom = match &a {
                        Atom::Sin(t) => Atom::Cos(t.clone()),
                        _ => unreachable!(),
                    };
                    let one_minus_c2 = Expr::one() - Expr::from_monomial(Q::one(), Monomial(alloc::vec![(cos_atom, 2)]));
                    extra.push(one_minus_c2.pow_u(((e - s_part) / 2) as u32));
                }
                Atom::Base(b) if e > 0 => {
                    extra.push(b.pow_u(e as u32));
                }
                _ => plain.push((a, e)),
            }
        }
        // plain stays sorted because we only removed entries
        let mut out = Expr::from_monomial(coeff, Monomial::from_sorted(plain));
        if !exp_arg.is_zero() {
            out = &out * &Expr::exp(&exp_arg);
        }
        for x in extra {
            out = &out * &x;
        }
        out
    }

    fn mul_terms(a: &Term, b: &Term) -> Expr {
        let c = &a.coeff * &b.coeff;
        if a.mono.is_one() {
            return Expr::from_monomial(c, b.mono.clone());
        }
        if b.mono.is_one() {
            return Expr::from_monomial(c, a.mono.clone());
        }
        Expr::from_raw(c, a.mono.merge(&b.mono))
    }

    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    mono: t.mono.clone(),
                    coeff: &t.coeff * c,
                })
                .collect(),
        }
    }

    fn pow_u(&self, n: u32) -> Expr {
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Integer power. Panics on a negative power of zero; see [`Expr::try_pow`].
    pub fn pow(&self, n: i64) -> Expr {
        self.try_pow(n).expect("negative power of zero")
    }

    pub fn try_pow(&self, n: i64) -> Option<Expr> {
        if n >= 0 {
            return Some(self.pow_u(n as u32));
        }
        if self.is_zero() {
            return None;
        }
        let n32 = n as i32;
        if self.terms.len() == 1 {
            let t = &self.terms[0];
            let c = rat_pow(&t.coeff, n);
            let raw: Vec<(Atom, i32)> = t.mono.0.iter().map(|(a, e)| (a.clone(), e * n32)).collect();
            return Some(Expr::from_raw(c, raw));
        }
        let (lead, g, base) = self.factor_content();
        let mut raw: Vec<(Atom, i32)> = g.0.iter().map(|(a, e)| (a.clone(), e * n32)).collect();
        raw.push((Atom::Base(Arc::new(base)), n32));
        raw.sort_by(|a, b| a.0.cmp(&b.0));
        // merge duplicates (cannot occur for Base, but keep ordering invariant)
        Some(Expr::from_raw(rat_pow(&lead, n), raw))
    }

    /// Split a multi-term expression as `lead * g * base` with `base`
    /// primitive: leading coefficient one and no common monomial factor.
    fn factor_content(&self) -> (Q, Monomial, Expr) {
        let lead = self.terms[0].coeff.clone();
        // common monomial: per-atom minimum exponent (absent counts as 0); exp atoms excluded
        let mut g: Vec<(Atom, i32)> = Vec::new();
        let mut seen: Vec<Atom> = Vec::new();
        for t in &self.terms {
            for (a, _) in &t.mono.0 {
                if matches!(a, Atom::Exp(_)) || seen.contains(a) {
                    continue;
                }
                seen.push(a.clone());
            }
        }
        for a in seen {
            let mut m = i32::MAX;
            for t in &self.terms {
                let e = t.mono.0.iter().find(|(b, _)| *b == a).map(|(_, e)| *e).unwrap_or(0);
                m = m.min(e);
            }
            if m != 0 {
                g.push((a, m));
            }
        }
        g.sort_by(|a, b| a.0.cmp(&b.0));
        let g = Monomial(g);
        let inv_g: Vec<(Atom, i32)> = g.0.iter().map(|(a, e)| (a.clone(), -e)).collect();
        let inv_g = Monomial(inv_g);
        let inv_lead = lead.recip();
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                mono: Monomial(t.mono.merge(&inv_g)),
                coeff: &t.coeff * &inv_lead,
            })
            .collect();
        (lead, g, Expr::from_terms(terms))
    }

    pub fn inv(&self) -> Expr {
        self.pow(-1)
    }

    pub fn try_inv(&self) -> Option<Expr> {
        self.try_pow(-1)
    }

    pub fn try_div(&self, other: &Expr) -> Option<Expr> {
        Some(self * &other.try_inv()?)
    }

    pub fn exp(arg: &Expr) -> Expr {
        let mut rest = Vec::new();
        let mut factor = Expr::one();
        for t in &arg.terms {
            if let [(Atom::Ln(inner), 1)] = t.mono.0.as_slice() {
                if t.coeff.is_integer() {
                    if let Some(n) = t.coeff.to_integer().to_i64() {
                        if let Some(p) = inner.try_pow(n) {
                            factor = &factor * &p;
                            continue;
                        }
                    }
                }
            }
            rest.push(t.clone());
        }
        let rest = Expr { terms: rest };
        if rest.is_zero() {
            return factor;
        }
        &factor * &Expr::atom(Atom::Exp(Arc::new(rest)))
    }

    pub fn sin(arg: &Expr) -> Expr {
        if arg.is_zero() {
            return Expr::zero();
        }
        if arg.terms[0].coeff.is_negative() {
            return -Expr::atom(Atom::Sin(Arc::new(-arg.clone())));
        }
        Expr::atom(Atom::Sin(Arc::new(arg.clone())))
    }

    pub fn cos(arg: &Expr) -> Expr {
        if arg.is_zero() {
            return Expr::one();
        }
        if arg.terms[0].coeff.is_negative() {
            return Expr::atom(Atom::Cos(Arc::new(-arg.clone())));
        }
        Expr::atom(Atom::Cos(Arc::new(arg.clone())))
    }

    pub fn ln(arg: &Expr) -> Expr {
        if arg.is_one() {
            return Expr::zero();
        }
        if let [t] = arg.terms.as_slice() {
            if t.coeff.is_one() {
                if let [(Atom::Exp(inner), 1)] = t.mono.0.as_slice() {
                    return inner.as_ref().clone();
                }
            }
        }
        Expr::atom(Atom::Ln(Arc::new(arg.clone())))
    }

    pub fn apply(head: Head, arg: &Expr) -> Expr {
        match head {
            Head::Exp => Expr::exp(arg),
            Head::Sin => Expr::sin(arg),
            Head::Cos => Expr::cos(arg),
            Head::Ln => Expr::ln(arg),
        }
    }

    /// Opaque function application `name(args)` with derivative multi-index.
    pub fn func_deriv(name: &str, args: Vec<Expr>, deriv: Vec<u32>) -> Expr {
        assert_eq!(args.len(), deriv.len(), "derivative index arity mismatch");
        Expr::atom(Atom::Func(Arc::new(FnApp {
            name: symbol(name),
            args,
            deriv,
        })))
    }

    pub fn func(name: &str, args: Vec<Expr>) -> Expr {
        let n = args.len();
        Expr::func_deriv(name, args, alloc::vec![0; n])
    }

    /// Reconstruct a tree view of the top-level structure.
    pub fn node(&self) -> Node {
        match self.terms.as_slice() {
            [] => Node::Rational(Q::zero()),
            [t] => term_node(t),
            ts => Node::Sum(ts.iter().map(|t| Expr::from_monomial(t.coeff.clone(), t.mono.clone())).collect()),
        }
    }

    /// Visit every atom, including atoms nested in arguments.
    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        for t in &self.terms {
            for (a, _) in &t.mono.0 {
                f(a);
                match a {
                    Atom::Func(app) => app.args.iter().for_each(|x| x.visit_atoms(f)),
                    _ => {
                        if let Some(arg) = a.arg() {
                            arg.visit_atoms(f)
                        }
                    }
                }
            }
        }
    }

    /// All symbols occurring anywhere (including inside function arguments).
    pub fn free_symbols(&self) -> alloc::collections::BTreeSet<Symbol> {
        let mut out = alloc::collections::BTreeSet::new();
        self.visit_atoms(&mut |a| {
            if let Atom::Sym(s) = a {
                out.insert(s.clone());
            }
        });
        out
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| {
            if let Atom::Sym(s) = a {
                if &**s == name {
                    found = true;
                }
            }
        });
        found
    }

    pub fn has_transcendental(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| found |= a.is_transcendental());
        found
    }

    /// Coefficient of `sym^k` when the expression is viewed as a polynomial in
    /// `sym` with everything else as coefficients (negative powers allowed).
    pub fn coeff_of(&self, sym: &str, k: i32) -> Expr {
        let target = Atom::Sym(symbol(sym));
        let terms = self
            .terms
            .iter()
            .filter_map(|t| {
                let e = t.mono.0.iter().find(|(a, _)| *a == target).map(|(_, e)| *e).unwrap_or(0);
                if e != k {
                    return None;
                }
                let mono: Vec<(Atom, i32)> = t.mono.0.iter().filter(|(a, _)| *a != target).cloned().collect();
                Some(Term {
                    mono: Monomial(mono),
                    coeff: t.coeff.clone(),
                })
            })
            .collect();
        Expr::from_terms(terms)
    }

    /// Rational coefficients `[c0, c1, ..]` when the expression is a
    /// polynomial in `sym` alone.
    pub fn poly_coeffs(&self, sym: &str) -> Option<Vec<Q>> {
        let mut out: Vec<Q> = Vec::new();
        for t in &self.terms {
            let k = match t.mono.0.as_slice() {
                [] => 0,
                [(Atom::Sym(s), e)] if &**s == sym && *e > 0 => *e as usize,
                _ => return None,
            };
            if out.len() <= k {
                out.resize(k + 1, q(0));
            }
            out[k] = t.coeff.clone();
        }
        Some(out)
    }
}

fn term_node(t: &Term) -> Node {
    let mut factors: Vec<Expr> = Vec::new();
    if !t.coeff.is_one() || t.mono.is_one() {
        factors.push(Expr::rational(t.coeff.clone()));
    }
    for (a, e) in &t.mono.0 {
        let base = Expr::atom(a.clone());
        if *e == 1 {
            factors.push(base);
        } else {
            factors.push(Expr::from_monomial(Q::one(), Monomial(alloc::vec![(a.clone(), *e)])));
        }
    }
    if factors.len() == 1 {
        let f = &factors[0];
        if let Some(c) = f.as_rational() {
            return Node::Rational(c);
        }
        let (a, e) = &f.terms[0].mono.0[0];
        if *e != 1 {
            let base = match a {
                Atom::Base(b) => b.as_ref().clone(),
                _ => Expr::atom(a.clone()),
            };
            return Node::IntPow(base, *e as i64);
        }
        return match a {
            Atom::Sym(s) => Node::Symbol(s.clone()),
            Atom::Func(app) => Node::Opaque {
                name: app.name.clone(),
                args: app.args.clone(),
                deriv: app.deriv.clone(),
            },
            Atom::Exp(x) => Node::Apply(Head::Exp, x.as_ref().clone()),
            Atom::Sin(x) => Node::Apply(Head::Sin, x.as_ref().clone()),
            Atom::Cos(x) => Node::Apply(Head::Cos, x.as_ref().clone()),
            Atom::Ln(x) => Node::Apply(Head::Ln, x.as_ref().clone()),
            Atom::Base(b) => Node::IntPow(b.as_ref().clone(), 1),
        };
    }
    Node::Product(factors)
}

pub(crate) fn rat_pow(c: &Q, n: i64) -> Q {
    let mut r = Q::one();
    let base = if n < 0 { c.recip() } else { c.clone() };
    for _ in 0..n.unsigned_abs() {
        r *= &base;
    }
    r
}

/// Positive gcd of a set of rationals.
pub(crate) fn rat_gcd(a: &Q, b: &Q) -> Q {
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    let den = a.denom() * b.denom();
    Q::new(num, den).abs()
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        // merge two sorted term lists
        let (a, b) = (&self.terms, &rhs.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].mono.cmp(&b[j].mono) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].coeff + &b[j].coeff;
                    if !c.is_zero() {
                        out.push(Term {
                            mono: a[i].mono.clone(),
                            coeff: c,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Expr { terms: out }
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = self.as_rational() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_rational() {
            return self.scale(&c);
        }
        let mut simple: Vec<Term> = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        let mut complex: Vec<Expr> = Vec::new();
        for a in &self.terms {
            for b in &rhs.terms {
                let p = Expr::mul_terms(a, b);
                if p.terms.len() == 1 {
                    simple.extend(p.terms);
                } else if !p.is_zero() {
                    complex.push(p);
                }
            }
        }
        for c in complex {
            simple.extend(c.terms);
        }
        Expr::from_terms(simple)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    mono: t.mono.clone(),
                    coeff: -t.coeff.clone(),
                })
                .collect(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(mut self) -> Expr {
        for t in &mut self.terms {
            t.coeff = -core::mem::take(&mut t.coeff);
        }
        self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<Expr> for &'a Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

impl From<Q> for Expr {
    fn from(c: Q) -> Self {
        Expr::rational(c)
    }
}

impl core::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        let mut terms = Vec::new();
        for e in iter {
            terms.extend(e.terms);
        }
        Expr::from_terms(terms)
    }
}
