//! Symbolic differentiation.

use alloc::sync::Arc;
use alloc::vec::Vec;

use super::{q, Atom, Expr, FnApp, Term};

impl Expr {
    /// Exact partial derivative with respect to the symbol `var`.
    pub fn diff(&self, var: &str) -> Expr {
        let mut parts: Vec<Term> = Vec::new();
        for t in self.terms() {
            for (i, (a, e)) in t.mono.factors().iter().enumerate() {
                let da = atom_diff(a, var);
                if da.is_zero() {
                    continue;
                }
                let mut raw = t.mono.factors().to_vec();
                if *e == 1 {
                    raw.remove(i);
                } else {
                    raw[i].1 -= 1;
                }
                let rest = Expr::from_raw(&t.coeff * q(*e as i64), raw);
                parts.extend((rest * da).terms);
            }
        }
        Expr::from_terms(parts)
    }

    /// Repeated derivative.
    pub fn diff_n(&self, var: &str, n: usize) -> Expr {
        (0..n).fold(self.clone(), |e, _| e.diff(var))
    }
}

fn atom_diff(a: &Atom, var: &str) -> Expr {
    match a {
        Atom::Sym(s) => {
            if &**s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Func(app) => {
            let mut out = Expr::zero();
            for (j, arg) in app.args.iter().enumerate() {
                let d = arg.diff(var);
                if d.is_zero() {
                    continue;
                }
                let mut deriv = app.deriv.clone();
                deriv[j] += 1;
                let f = Expr::atom(Atom::Func(Arc::new(FnApp {
                    name: app.name.clone(),
                    args: app.args.clone(),
                    deriv,
                })));
                out = out + f * d;
            }
            out
        }
        Atom::Exp(x) => {
            let d = x.diff(var);
            if d.is_zero() {
                return d;
            }
            Expr::atom(a.clone()) * d
        }
        Atom::Sin(x) => {
            let d = x.diff(var);
            if d.is_zero() {
                return d;
            }
            Expr::cos(x) * d
        }
        Atom::Cos(x) => {
            let d = x.diff(var);
            if d.is_zero() {
                return d;
            }
            -(Expr::sin(x) * d)
        }
        Atom::Ln(x) => {
            let d = x.diff(var);
            if d.is_zero() {
                return d;
            }
            d * x.inv()
        }
        Atom::Base(b) => b.diff(var),
    }
}
