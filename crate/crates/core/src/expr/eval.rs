//! Numeric evaluation: exact over the rationals where possible, `f64` otherwise.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{rat_pow, symbol, Atom, Expr, Symbol, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(Q),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Value::Float(x) => *x,
        }
    }

    fn is_exact_zero(&self) -> bool {
        matches!(self, Value::Exact(q) if q.is_zero())
    }

    fn add(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Float(self.to_f64() + o.to_f64()),
        }
    }

    fn mul(&self, o: &Value) -> Value {
        match (self, o) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Float(self.to_f64() * o.to_f64()),
        }
    }

    fn powi(&self, e: i32) -> Result<Value, EvalError> {
        match self {
            Value::Exact(a) => {
                if a.is_zero() && e < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(Value::Exact(rat_pow(a, e as i64)))
            }
            Value::Float(x) => {
                if *x == 0.0 && e < 0 {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(Value::Float(libm::pow(*x, e as f64)))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("no stand-in bound for opaque function `{0}`")]
    UnboundFunction(String),
    #[error("ln of a non-positive value")]
    DomainError,
    #[error("division by zero")]
    DivisionByZero,
}

/// Concrete replacement for an opaque function: `body` in the symbols
/// `params`. Partial derivatives are taken symbolically from `body`.
#[derive(Clone, Debug, PartialEq)]
pub struct FnStandIn {
    pub params: Vec<Symbol>,
    pub body: Expr,
}

impl FnStandIn {
    pub fn new(params: &[&str], body: Expr) -> Self {
        FnStandIn {
            params: params.iter().map(|p| symbol(p)).collect(),
            body,
        }
    }

    pub fn derivative(&self, deriv: &[u32]) -> Expr {
        let mut e = self.body.clone();
        for (p, &k) in self.params.iter().zip(deriv) {
            e = e.diff_n(p, k as usize);
        }
        e
    }
}

/// Symbol and opaque-function bindings for [`Expr::evaluate`].
#[derive(Clone, Debug, Default)]
pub struct ValueBindings {
    values: BTreeMap<Symbol, Value>,
    functions: BTreeMap<Symbol, FnStandIn>,
}

impl ValueBindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, v: Value) -> Self {
        self.set(name, v);
        self
    }

    pub fn with_q(self, name: &str, v: Q) -> Self {
        self.with(name, Value::Exact(v))
    }

    pub fn set(&mut self, name: &str, v: Value) {
        self.values.insert(symbol(name), v);
    }

    pub fn set_function(&mut self, name: &str, f: FnStandIn) {
        self.functions.insert(symbol(name), f);
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }
}

impl Expr {
    pub fn evaluate(&self, b: &ValueBindings) -> Result<Value, EvalError> {
        Evaluator::new(b).eval(self)
    }
}

/// Evaluator with per-call caches for atoms and stand-in derivatives.
pub(crate) struct Evaluator<'a> {
    b: &'a ValueBindings,
    atoms: BTreeMap<Atom, Value>,
    derivs: BTreeMap<(Symbol, Vec<u32>), Expr>,
}

impl<'a> Evaluator<'a> {
    pub(crate) fn new(b: &'a ValueBindings) -> Self {
        Evaluator {
            b,
            atoms: BTreeMap::new(),
            derivs: BTreeMap::new(),
        }
    }

    pub(crate) fn eval(&mut self, e: &Expr) -> Result<Value, EvalError> {
        let mut acc = Value::Exact(Q::zero());
        for t in e.terms() {
            acc = acc.add(&self.eval_term(&t.coeff, t.mono.factors())?);
        }
        Ok(acc)
    }

    pub(crate) fn eval_term(&mut self, c: &Q, factors: &[(Atom, i32)]) -> Result<Value, EvalError> {
        let mut v = Value::Exact(c.clone());
        for (a, e) in factors {
            let av = self.atom(a)?;
            v = v.mul(&av.powi(*e)?);
        }
        Ok(v)
    }

    fn atom(&mut self, a: &Atom) -> Result<Value, EvalError> {
        if let Some(v) = self.atoms.get(a) {
            return Ok(v.clone());
        }
        let v = match a {
            Atom::Sym(s) => self
                .b
                .values
                .get(s)
                .cloned()
                .ok_or_else(|| EvalError::UnboundSymbol(s.to_string()))?,
            Atom::Func(app) => {
                let f = self
                    .b
                    .functions
                    .get(&app.name)
                    .ok_or_else(|| EvalError::UnboundFunction(app.name.to_string()))?;
                let key = (app.name.clone(), app.deriv.clone());
                let body = match self.derivs.get(&key) {
                    Some(d) => d.clone(),
                    None => {
                        let d = f.derivative(&app.deriv);
                        self.derivs.insert(key, d.clone());
                        d
                    }
                };
                let params = f.params.clone();
                let mut inner = ValueBindings::new();
                inner.functions = self.b.functions.clone();
                for (p, x) in params.iter().zip(&app.args) {
                    let xv = self.eval(x)?;
                    inner.values.insert(p.clone(), xv);
                }
                Evaluator::new(&inner).eval(&body)?
            }
            Atom::Exp(x) => match self.eval(x)? {
                v if v.is_exact_zero() => Value::Exact(Q::one()),
                v => Value::Float(libm::exp(v.to_f64())),
            },
            Atom::Sin(x) => match self.eval(x)? {
                v if v.is_exact_zero() => Value::Exact(Q::zero()),
                v => Value::Float(libm::sin(v.to_f64())),
            },
            Atom::Cos(x) => match self.eval(x)? {
                v if v.is_exact_zero() => Value::Exact(Q::one()),
                v => Value::Float(libm::cos(v.to_f64())),
            },
            Atom::Ln(x) => match self.eval(x)? {
                Value::Exact(q) if q.is_one() => Value::Exact(Q::zero()),
                Value::Exact(q) if !q.is_positive() => return Err(EvalError::DomainError),
                v => {
                    let f = v.to_f64();
                    if f <= 0.0 || f.is_nan() {
                        return Err(EvalError::DomainError);
                    }
                    Value::Float(libm::log(f))
                }
            },
            Atom::Base(x) => self.eval(x)?,
        };
        self.atoms.insert(a.clone(), v.clone());
        Ok(v)
    }
}
