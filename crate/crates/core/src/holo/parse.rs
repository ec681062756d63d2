//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := '-' factor | power
//! power    := base ('^' exponent)?
//! exponent := integer | '(' '-'? integer ('/' integer)? ')'
//! base     := number | 'i' | 'z' | name | '[' signed ',' signed ']'
//!           | func '(' expr ')' | '(' expr ')'
//! func     := 'exp' | 'log' | 'sqrt'
//! ```
//!
//! A leading `-` directly followed by a number literal (and no `^`) folds
//! into a negative constant. `name` is looked up in the caller's bindings;
//! `pi` is predefined. `[re, im]` is a complex literal.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use super::expr::{Exponent, Expr};

pub type Bindings = BTreeMap<String, Complex64>;

const RESERVED: [&str; 5] = ["z", "i", "exp", "log", "sqrt"];

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: expected {}, found {found}", expected.join(" | "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(x) => write!(f, "number {x}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == b'.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let x: f64 = lit.parse().map_err(|_| ParseError {
                offset: start,
                expected: vec!["decimal literal".into()],
                found: format!("`{lit}`"),
            })?;
            out.push((start, Tok::Num(x)));
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if b"+-*/^()[],".contains(&ch) {
            out.push((i, Tok::Sym(ch as char)));
            i += 1;
        } else {
            let c = text[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: i,
                expected: vec!["expression".into()],
                found: format!("`{c}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    bindings: &'a Bindings,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{c}`")])
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    lhs = lhs + self.term()?;
                }
                Tok::Sym('-') => {
                    self.bump();
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    lhs = lhs * self.factor()?;
                }
                Tok::Sym('/') => {
                    self.bump();
                    lhs = lhs / self.factor()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            self.bump();
            if let Tok::Num(x) = *self.peek() {
                if *self.peek_at(1) != Tok::Sym('^') {
                    self.bump();
                    return Ok(Expr::real(-x));
                }
            }
            return Ok(-self.factor()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        let exponent = match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Exponent::integer(self.integer(x)?)
            }
            Tok::Sym('(') => {
                self.bump();
                let neg = if *self.peek() == Tok::Sym('-') {
                    self.bump();
                    true
                } else {
                    false
                };
                let num = self.integer_token()?;
                let num = if neg { -num } else { num };
                let e = if *self.peek() == Tok::Sym('/') {
                    self.bump();
                    let at = self.offset();
                    let den = self.integer_token()?;
                    Exponent::rational(num, den).ok_or(ParseError {
                        offset: at,
                        expected: vec!["nonzero denominator".into()],
                        found: "0".into(),
                    })?
                } else {
                    Exponent::integer(num)
                };
                self.expect(')')?;
                e
            }
            _ => return self.fail(&["integer exponent", "`(`"]),
        };
        Ok(base.pow(exponent))
    }

    fn integer(&self, x: f64) -> Result<i64, ParseError> {
        if x.fract() == 0.0 && x.abs() < 1e15 {
            Ok(x as i64)
        } else {
            Err(ParseError {
                offset: self.toks[self.pos - 1].0,
                expected: vec!["integer".into()],
                found: format!("number {x}"),
            })
        }
    }

    fn integer_token(&mut self) -> Result<i64, ParseError> {
        match *self.peek() {
            Tok::Num(x) => {
                self.bump();
                self.integer(x)
            }
            _ => self.fail(&["integer"]),
        }
    }

    fn signed(&mut self) -> Result<f64, ParseError> {
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match *self.peek() {
            Tok::Num(x) => {
                self.bump();
                Ok(if neg { -x } else { x })
            }
            _ => self.fail(&["number"]),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(x) => {
                self.bump();
                Ok(Expr::real(x))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('[') => {
                self.bump();
                let re = self.signed()?;
                self.expect(',')?;
                let im = self.signed()?;
                self.expect(']')?;
                Ok(Expr::constant(Complex64::new(re, im)))
            }
            Tok::Ident(name) => {
                let at = self.offset();
                self.bump();
                match name.as_str() {
                    "z" => Ok(Expr::Var),
                    "i" => Ok(Expr::constant(Complex64::new(0.0, 1.0))),
                    "exp" | "log" | "sqrt" => {
                        self.expect('(')?;
                        let arg = self.expr()?;
                        self.expect(')')?;
                        Ok(match name.as_str() {
                            "exp" => arg.exp(),
                            "log" => arg.log(),
                            _ => arg.sqrt(),
                        })
                    }
                    _ => match self.bindings.get(&name) {
                        Some(c) => Ok(Expr::constant(*c)),
                        None if name == "pi" => Ok(Expr::real(std::f64::consts::PI)),
                        None => Err(ParseError {
                            offset: at,
                            expected: vec!["`z`".into(), "`i`".into(), "function".into(), "bound name".into()],
                            found: format!("unbound name `{name}`"),
                        }),
                    },
                }
            }
            _ => self.fail(&["number", "`z`", "`i`", "`(`", "`[`", "function", "name"]),
        }
    }
}

/// Parses an expression with no bound names besides `pi`.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    parse_with(text, &Bindings::new())
}

/// Parses an expression, substituting each bound name by its constant value.
pub fn parse_with(text: &str, bindings: &Bindings) -> Result<Expr, ParseError> {
    if let Some(bad) = bindings.keys().find(|k| RESERVED.contains(&k.as_str())) {
        return Err(ParseError {
            offset: 0,
            expected: vec!["non-reserved binding name".into()],
            found: format!("binding for `{bad}`"),
        });
    }
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, bindings };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.fail(&["operator", "end of input"]);
    }
    Ok(e)
}

/// Convenience for a single real binding such as `n = 3`.
pub fn bind(name: &str, value: f64) -> Bindings {
    let mut b = Bindings::new();
    b.insert(name.to_string(), Complex64::new(value, 0.0));
    b
}
