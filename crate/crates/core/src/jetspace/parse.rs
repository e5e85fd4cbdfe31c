//! Plain-text syntax for jet expressions.
//!
//! `p[2,0]` is p_tt, `v[1,1]` is v_tx; scalars are `alpha`, `beta`, `t`, `x`,
//! `ts`, `xs`, `zeta`, `z`, `s`, `q`. Printing then parsing reproduces the
//! canonical form exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::expr::JetExpr;
use super::poly::Poly;
use super::var::{Dep, Indet, JetVar};
use crate::error::{Error, Result};

#[derive(Debug)]
enum Ast {
    Num(BigInt),
    Var(Indet),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn small(&mut self) -> Result<usize> {
        let n = self.integer()?;
        match usize::try_from(n) {
            Ok(v) if v <= 255 => Ok(v),
            _ => self.err("index too large"),
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(b'/') => {
                    self.pos += 1;
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            let e = self.small()? as i32;
            return Ok(Ast::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Ast::Num(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if self.peek() == Some(b'[') {
                    let Some(dep) = Dep::from_name(&name) else {
                        return self.err(format!("unknown dependent variable `{name}`"));
                    };
                    self.pos += 1;
                    let a = self.small()?;
                    self.expect(b',')?;
                    let b = self.small()?;
                    self.expect(b']')?;
                    let j = JetVar::new(dep, a, b)?;
                    return Ok(Ast::Var(Indet::Jet(j)));
                }
                match Indet::scalar_from_name(&name) {
                    Some(v) => Ok(Ast::Var(v)),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown symbol `{name}`"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

fn eval(a: &Ast) -> Result<JetExpr> {
    Ok(match a {
        Ast::Num(n) => JetExpr::rational(BigRational::from_integer(n.clone())),
        Ast::Var(v) => JetExpr::var(*v),
        Ast::Add(x, y) => eval(x)? + eval(y)?,
        Ast::Sub(x, y) => eval(x)? - eval(y)?,
        Ast::Neg(x) => -eval(x)?,
        Ast::Mul(x, y) => eval(x)? * eval(y)?,
        Ast::Div(x, y) => eval(x)? * eval_recip(y)?,
        Ast::Pow(x, e) if *e < 0 => eval_recip(x)?.powi(-e)?,
        Ast::Pow(x, e) => eval(x)?.powi(*e)?,
    })
}

/// Reciprocal that distributes over products and powers, so printed
/// denominators come back as separate factors.
fn eval_recip(a: &Ast) -> Result<JetExpr> {
    Ok(match a {
        Ast::Mul(x, y) => eval_recip(x)? * eval_recip(y)?,
        Ast::Div(x, y) => eval(y)? * eval_recip(x)?,
        Ast::Neg(x) => -eval_recip(x)?,
        Ast::Pow(x, e) if *e >= 0 => eval_recip(x)?.powi(*e)?,
        other => eval(other)?.recip()?,
    })
}

pub fn parse(s: &str) -> Result<JetExpr> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let ast = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    eval(&ast)
}

fn print_poly(p: &Poly) -> String {
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let factors: Vec<String> = m
            .iter()
            .map(|(v, e)| if e == 1 { v.name() } else { format!("{}^{}", v.name(), e) })
            .collect();
        if factors.is_empty() {
            out.push_str(&a.to_string());
        } else {
            if !a.is_one() {
                out.push_str(&format!("{a}*"));
            }
            out.push_str(&factors.join("*"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn is_single_term(p: &Poly) -> bool {
    p.len() == 1
}

pub fn print(e: &JetExpr) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let s = e.scale();
    let num = e.numerator();
    let mut out = String::new();
    let num_one = num.is_one();
    if s.is_one() {
        out.push_str(&print_poly(num));
    } else if -s == BigRational::one() && !num_one {
        if is_single_term(num) {
            out.push('-');
            out.push_str(&print_poly(num));
        } else {
            out.push_str(&format!("-({})", print_poly(num)));
        }
    } else {
        let sv = if s.is_integer() { s.numer().to_string() } else { format!("{}/{}", s.numer(), s.denom()) };
        if num_one {
            out.push_str(&sv);
        } else {
            let sv = if s.is_integer() { sv } else { format!("({sv})") };
            if is_single_term(num) {
                out.push_str(&format!("{sv}*{}", print_poly(num)));
            } else {
                out.push_str(&format!("{sv}*({})", print_poly(num)));
            }
        }
    }
    if e.den_factors().is_empty() {
        return out;
    }
    if !s.is_one() && !num_one || s.is_one() && !is_single_term(num) || !s.is_integer() && num_one {
        out = format!("({out})");
    }
    let den: Vec<String> = e
        .den_factors()
        .iter()
        .map(|(f, k)| {
            let body = if is_single_term(f) { print_poly(f) } else { format!("({})", print_poly(f)) };
            if *k == 1 {
                body
            } else {
                format!("{body}^{k}")
            }
        })
        .collect();
    format!("{out}/({})", den.join("*"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_jet_syntax() {
        let e = parse("p[2,0] - v[1,1]*alpha").unwrap();
        let expect = JetExpr::jet(Dep::P, 2, 0) - JetExpr::jet(Dep::V, 1, 1) * JetExpr::alpha();
        assert!(e.structurally_eq(&expect));
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse("p[1,"), Err(Error::Parse { .. })));
        assert!(matches!(parse("gamma"), Err(Error::Parse { .. })));
        assert!(matches!(parse("1/0"), Err(Error::DivisionByZero)));
    }

    #[test]
    fn round_trips() {
        for s in [
            "-3/4*beta^2*p[1,0]/((1 - 2*beta*p[0,0])^2*(p[0,1]^2 - p[1,0]^2))",
            "1/(2*beta)",
            "-(x + t)/beta",
            "p[0,1]/(p[0,1]^2 - (1 - 2*beta*p[0,0])*p[1,0]^2)^2",
            "zeta^2*V[2,0] + s*q - ts*xs*vs[0,2] + f[1,1]*z",
        ] {
            let e = parse(s).unwrap();
            let back = parse(&print(&e)).unwrap();
            assert!(back.structurally_eq(&e), "{s} -> {} -> {}", print(&e), print(&back));
        }
    }
}
