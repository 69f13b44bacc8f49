use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::{Expr, MapExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the source where parsing stopped.
    pub offset: usize,
    /// Tokens that would have been accepted at `offset`.
    pub expected: Vec<String>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}", self.message, self.offset)?;
        if !self.expected.is_empty() {
            write!(f, " (expected one of: {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(BigInt),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    inputs: Vec<String>,
}

const FACTOR_START: [&str; 4] = ["natural", "identifier", "(", "-"];

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Peeks the next token and its start offset without consuming it.
    fn peek(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let Some(&c) = bytes.get(start) else {
            return Ok((Tok::End, start, start));
        };
        if c.is_ascii_alphabetic() {
            let mut end = start + 1;
            while end < bytes.len() && bytes[end].is_ascii_alphanumeric() {
                end += 1;
            }
            return Ok((Tok::Ident(self.src[start..end].to_string()), start, end));
        }
        if c.is_ascii_digit() {
            let mut end = start + 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
            let n: BigInt = self.src[start..end].parse().expect("digits");
            return Ok((Tok::Nat(n), start, end));
        }
        if "+-*/^(),=".contains(c as char) {
            return Ok((Tok::Sym(c as char), start, start + 1));
        }
        let ch = self.src[start..].chars().next().expect("nonempty");
        Err(ParseError { offset: start, expected: vec![], message: format!("unexpected character `{ch}`") })
    }

    fn error(&self, offset: usize, found: &Tok, expected: &[&str]) -> ParseError {
        ParseError {
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            message: format!("unexpected {}", found.describe()),
        }
    }

    fn expect_sym(&mut self, sym: char) -> Result<(), ParseError> {
        let (tok, start, end) = self.peek()?;
        if tok == Tok::Sym(sym) {
            self.pos = end;
            Ok(())
        } else {
            Err(self.error(start, &tok, &[&sym.to_string()]))
        }
    }

    fn ident(&mut self) -> Result<(String, usize), ParseError> {
        let (tok, start, end) = self.peek()?;
        match tok {
            Tok::Ident(s) => {
                self.pos = end;
                Ok((s, start))
            }
            other => Err(self.error(start, &other, &["identifier"])),
        }
    }

    fn map(&mut self) -> Result<MapExpr, ParseError> {
        let (name, _) = self.ident()?;
        self.expect_sym('(')?;
        loop {
            let (var, at) = self.ident()?;
            if self.inputs.contains(&var) {
                return Err(ParseError {
                    offset: at,
                    expected: vec![],
                    message: format!("duplicate input `{var}`"),
                });
            }
            self.inputs.push(var);
            let (tok, start, end) = self.peek()?;
            match tok {
                Tok::Sym(',') => self.pos = end,
                Tok::Sym(')') => {
                    self.pos = end;
                    break;
                }
                other => return Err(self.error(start, &other, &[",", ")"])),
            }
        }
        self.expect_sym('=')?;
        let mut outputs = vec![self.expr()?];
        loop {
            let (tok, start, end) = self.peek()?;
            match tok {
                Tok::Sym(',') => {
                    self.pos = end;
                    outputs.push(self.expr()?);
                }
                Tok::End => break,
                other => return Err(self.error(start, &other, &["+", "-", "*", "/", "^", ",", "end of input"])),
            }
        }
        Ok(MapExpr { name, inputs: std::mem::take(&mut self.inputs), outputs })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let (tok, _, end) = self.peek()?;
            match tok {
                Tok::Sym('+') => {
                    self.pos = end;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.pos = end;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let (tok, _, end) = self.peek()?;
            match tok {
                Tok::Sym('*') => {
                    self.pos = end;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Sym('/') => {
                    self.pos = end;
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let (tok, _, end) = self.peek()?;
        let negate = tok == Tok::Sym('-');
        if negate {
            self.pos = end;
        }
        let mut e = self.base()?;
        let (tok, _, end) = self.peek()?;
        if tok == Tok::Sym('^') {
            self.pos = end;
            let (tok, start, end) = self.peek()?;
            let Tok::Nat(n) = tok else {
                return Err(self.error(start, &tok, &["natural"]));
            };
            let exp = n.to_u32().ok_or_else(|| ParseError {
                offset: start,
                expected: vec![],
                message: format!("exponent {n} too large"),
            })?;
            self.pos = end;
            e = Expr::Pow(Box::new(e), exp);
        }
        Ok(if negate { Expr::Neg(Box::new(e)) } else { e })
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (tok, start, end) = self.peek()?;
        match tok {
            Tok::Nat(n) => {
                self.pos = end;
                Ok(Expr::Const(n))
            }
            Tok::Ident(name) => match self.inputs.iter().position(|v| *v == name) {
                Some(i) => {
                    self.pos = end;
                    Ok(Expr::Var(i))
                }
                None => Err(ParseError {
                    offset: start,
                    expected: vec![],
                    message: format!("unknown variable `{name}`"),
                }),
            },
            Tok::Sym('(') => {
                self.pos = end;
                let e = self.expr()?;
                self.expect_sym(')')?;
                Ok(e)
            }
            other => Err(self.error(start, &other, &FACTOR_START[..3])),
        }
    }
}

pub(super) fn parse_map(src: &str) -> Result<MapExpr, ParseError> {
    let mut p = Parser { src, pos: 0, inputs: Vec::new() };
    p.map()
}
