//! Deterministic text rendering that the parser reads back.

use alloc::string::String;
use core::fmt::{self, Display, Write};

use num_traits::{One, Signed};

use super::{Atom, Expr, Term, Q};

impl Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write_term(f, t, &t.coeff.abs())?;
        }
        Ok(())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, c: &Q) -> fmt::Result {
    let factors = t.mono.factors();
    let mut first = true;
    if !c.is_one() || factors.is_empty() {
        write_rational(f, c)?;
        first = false;
    }
    for (a, e) in factors {
        if !first {
            f.write_str("*")?;
        }
        first = false;
        write_atom(f, a)?;
        if *e != 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &Q) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn write_atom(f: &mut fmt::Formatter<'_>, a: &Atom) -> fmt::Result {
    match a {
        Atom::Sym(s) => f.write_str(s),
        Atom::Func(app) => {
            f.write_str(&app.name)?;
            if app.deriv.iter().any(|&d| d != 0) {
                f.write_str("__d")?;
                for (i, d) in app.deriv.iter().enumerate() {
                    if i > 0 {
                        f.write_str("_")?;
                    }
                    write!(f, "{d}")?;
                }
            }
            f.write_str("(")?;
            for (i, x) in app.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")
        }
        Atom::Exp(x) => write!(f, "exp({x})"),
        Atom::Sin(x) => write!(f, "sin({x})"),
        Atom::Cos(x) => write!(f, "cos({x})"),
        Atom::Ln(x) => write!(f, "ln({x})"),
        Atom::Base(x) => write!(f, "({x})"),
    }
}

impl Expr {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{self}");
        s
    }
}
