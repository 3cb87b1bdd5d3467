//! Recursive-descent parser for the infix expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ('+' | '-')? INT | '(' ('+' | '-')? INT ')'
//! primary := INT | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Derivatives of an opaque function `f` are written `f__d1_0_2(a, b, c)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;

use super::{Expr, Head, Q};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { offset: usize, name: String },
    #[error("division by zero at byte {offset}")]
    DivisionByZero { offset: usize },
}

/// Parse with no opaque functions declared.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &[])
}

/// Parse, accepting calls to the given opaque function names.
pub fn parse_with(text: &str, opaque: &[&str]) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        opaque,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

/// Split `f__d1_0_2` into (`f`, [1,0,2]).
pub(crate) fn split_deriv_name(name: &str) -> Option<(&str, Vec<u32>)> {
    let idx = name.find("__d")?;
    let (base, rest) = (&name[..idx], &name[idx + 3..]);
    if base.is_empty() || rest.is_empty() {
        return None;
    }
    let deriv = rest
        .split('_')
        .map(|p| p.parse::<u32>().ok())
        .collect::<Option<Vec<_>>>()?;
    Some((base, deriv))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    opaque: &'a [&'a str],
}

impl Parser<'_> {
    fn syntax(&self, message: &str) -> ParseError {
        ParseError::SyntaxError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&alloc::format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.unary()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.unary()?;
                acc = acc.try_div(&rhs).ok_or(ParseError::DivisionByZero { offset: at })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let at = self.pos;
        let n = if self.eat(b'(') {
            let n = self.signed_int()?;
            self.expect(b')')?;
            n
        } else {
            self.signed_int()?
        };
        base.try_pow(n).ok_or(ParseError::DivisionByZero { offset: at })
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        self.skip_ws();
        let start = self.pos;
        let digits = String::from(self.digits());
        if digits.is_empty() {
            return Err(self.syntax("expected integer exponent"));
        }
        let n: i64 = digits.parse().map_err(|_| ParseError::SyntaxError {
            offset: start,
            message: "exponent out of range".to_string(),
        })?;
        Ok(if neg { -n } else { n })
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn ident(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let d = String::from(self.digits());
                let n: BigInt = d.parse().map_err(|_| self.syntax("bad integer"))?;
                Ok(Expr::rational(Q::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                let name = String::from(self.ident());
                if self.peek() != Some(b'(') {
                    return Ok(Expr::sym(&name));
                }
                self.pos += 1;
                let mut args = alloc::vec![self.expr()?];
                while self.eat(b',') {
                    args.push(self.expr()?);
                }
                self.expect(b')')?;
                self.call(start, &name, args)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn call(&self, offset: usize, name: &str, args: Vec<Expr>) -> Result<Expr, ParseError> {
        if let Some(head) = Head::from_name(name) {
            if args.len() != 1 {
                return Err(ParseError::SyntaxError {
                    offset,
                    message: alloc::format!("`{name}` takes one argument"),
                });
            }
            return Ok(Expr::apply(head, &args[0]));
        }
        let (base, deriv) = match split_deriv_name(name) {
            Some((b, d)) => (b, Some(d)),
            None => (name, None),
        };
        if !self.opaque.contains(&base) {
            return Err(ParseError::UnknownFunction {
                offset,
                name: name.to_string(),
            });
        }
        let deriv = deriv.unwrap_or_else(|| alloc::vec![0; args.len()]);
        if deriv.len() != args.len() {
            return Err(ParseError::SyntaxError {
                offset,
                message: alloc::format!("derivative index of `{name}` does not match {} arguments", args.len()),
            });
        }
        Ok(Expr::func_deriv(base, args, deriv))
    }
}
