//! Simultaneous substitution of symbols by expressions.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{symbol, Atom, Expr, FnApp, Symbol};

/// Symbol-to-expression map for substitution.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings(BTreeMap<Symbol, Expr>);

impl Bindings {
    pub fn new() -> Self {
        Bindings(BTreeMap::new())
    }

    /// Bind `name`. Panics if it is already bound.
    pub fn with(mut self, name: &str, e: Expr) -> Self {
        self.insert(name, e);
        self
    }

    pub fn insert(&mut self, name: &str, e: Expr) {
        let prev = self.0.insert(symbol(name), e);
        assert!(prev.is_none(), "symbol `{name}` bound twice");
    }

    pub fn get(&self, name: &str) -> Option<&Expr> {
        self.0.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Expr)> {
        self.0.iter()
    }
}

impl FromIterator<(Symbol, Expr)> for Bindings {
    fn from_iter<I: IntoIterator<Item = (Symbol, Expr)>>(iter: I) -> Self {
        let mut b = Bindings::new();
        for (k, v) in iter {
            b.insert(&k, v);
        }
        b
    }
}

impl Expr {
    /// Simultaneous substitution. Panics if a denominator becomes zero.
    pub fn subst(&self, b: &Bindings) -> Expr {
        self.try_subst(b).expect("substitution produced a zero denominator")
    }

    /// Simultaneous substitution; `None` if a denominator becomes zero.
    pub fn try_subst(&self, b: &Bindings) -> Option<Expr> {
        if b.is_empty() {
            return Some(self.clone());
        }
        self.map_atoms(&mut |a| match a {
            Atom::Sym(s) => b.get(s).cloned(),
            _ => None,
        })
    }

    /// Replace every application of the opaque function `name` (and its
    /// derivatives) by `body`, whose arguments are the symbols `params`.
    pub fn subst_fn(&self, name: &str, params: &[&str], body: &Expr) -> Expr {
        self.map_atoms(&mut |a| match a {
            Atom::Func(app) if &*app.name == name && app.args.len() == params.len() => {
                let mut d = body.clone();
                for (p, k) in params.iter().zip(&app.deriv) {
                    d = d.diff_n(p, *k as usize);
                }
                let b: Bindings = params.iter().map(|p| symbol(p)).zip(app.args.iter().cloned()).collect();
                Some(d.subst(&b))
            }
            _ => None,
        })
        .expect("substitution produced a zero denominator")
    }

    /// Convenience for a single binding.
    pub fn subst1(&self, name: &str, e: &Expr) -> Expr {
        self.subst(&Bindings::new().with(name, e.clone()))
    }

    /// Rebuild bottom-up, replacing atoms for which `f` returns a value.
    /// Atoms that `f` leaves alone have their arguments rewritten recursively.
    pub(crate) fn map_atoms(&self, f: &mut dyn FnMut(&Atom) -> Option<Expr>) -> Option<Expr> {
        let mut out: Vec<Expr> = Vec::with_capacity(self.terms().len());
        let mut changed = false;
        for t in self.terms() {
            let mut acc = Expr::rational(t.coeff.clone());
            let mut raw = Vec::new();
            let mut term_changed = false;
            for (a, e) in t.mono.factors() {
                let (v, ch) = map_atom(a, f)?;
                match v {
                    None => raw.push((a.clone(), *e)),
                    Some(v) => {
                        term_changed |= ch;
                        acc = acc * v.try_pow(*e as i64)?;
                    }
                }
            }
            if term_changed {
                changed = true;
                raw.sort_by(|x, y| x.0.cmp(&y.0));
                out.push(acc * Expr::from_raw(super::q(1), raw));
            } else {
                out.push(Expr::from_monomial(t.coeff.clone(), t.mono.clone()));
            }
        }
        if !changed {
            return Some(self.clone());
        }
        Some(out.into_iter().sum())
    }
}

/// Returns (replacement, changed). `None` replacement means keep the atom.
fn map_atom(a: &Atom, f: &mut dyn FnMut(&Atom) -> Option<Expr>) -> Option<(Option<Expr>, bool)> {
    if let Some(v) = f(a) {
        return Some((Some(v), true));
    }
    let r = match a {
        Atom::Sym(_) => return Some((None, false)),
        Atom::Func(app) => {
            let mut args = Vec::with_capacity(app.args.len());
            let mut ch = false;
            for x in &app.args {
                let y = x.map_atoms(f)?;
                ch |= &y != x;
                args.push(y);
            }
            if !ch {
                return Some((None, false));
            }
            Expr::atom(Atom::Func(Arc::new(FnApp {
                name: app.name.clone(),
                args,
                deriv: app.deriv.clone(),
            })))
        }
        Atom::Exp(x) | Atom::Sin(x) | Atom::Cos(x) | Atom::Ln(x) | Atom::Base(x) => {
            let y = x.map_atoms(f)?;
            if &y == x.as_ref() {
                return Some((None, false));
            }
            match a {
                Atom::Exp(_) => Expr::exp(&y),
                Atom::Sin(_) => Expr::sin(&y),
                Atom::Cos(_) => Expr::cos(&y),
                Atom::Ln(_) => Expr::ln(&y),
                _ => y,
            }
        }
    };
    Some((Some(r), true))
}
