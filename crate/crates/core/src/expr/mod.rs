//! Rational maps `f: K^n -> K^m` written in a small expression language,
//! evaluated over any ring descriptor.
//!
//! ```text
//! f(x, y) = x^2 + 3*x*y, 1/(1 + x)
//! ```

mod parse;

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};

pub use parse::ParseError;

use crate::error::{DomainWitness, Error, Result};
use crate::ring::RingElement;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    /// Non-negative integer literal; negative constants are `Neg(Const(_))`.
    Const(BigInt),
    /// Index into the map's input list.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    pub fn constant(n: i64) -> Expr {
        let c = Expr::Const(BigInt::from(n.unsigned_abs()));
        if n < 0 {
            Expr::Neg(Box::new(c))
        } else {
            c
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.sign() == Sign::Minus => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var(_) => 5,
        }
    }

    /// Replaces every `Var(i)` by `args[i]`.
    pub fn substitute(&self, args: &[Expr]) -> Expr {
        let b = |e: &Expr| Box::new(e.substitute(args));
        match self {
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Var(i) => args[*i].clone(),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Div(x, y) => Expr::Div(b(x), b(y)),
            Expr::Neg(x) => Expr::Neg(b(x)),
            Expr::Pow(x, n) => Expr::Pow(b(x), *n),
        }
    }

    fn shift_vars(&self, by: usize) -> Expr {
        let b = |e: &Expr| Box::new(e.shift_vars(by));
        match self {
            Expr::Const(c) => Expr::Const(c.clone()),
            Expr::Var(i) => Expr::Var(i + by),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Div(x, y) => Expr::Div(b(x), b(y)),
            Expr::Neg(x) => Expr::Neg(b(x)),
            Expr::Pow(x, n) => Expr::Pow(b(x), *n),
        }
    }

    pub fn has_division(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => false,
            Expr::Div(..) => true,
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) => x.has_division() || y.has_division(),
            Expr::Neg(x) | Expr::Pow(x, _) => x.has_division(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { expr: self, names }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, names: &[String], min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Expr::Const(c) => write!(f, "{c}")?,
            Expr::Var(i) => f.write_str(&names[*i])?,
            Expr::Add(x, y) | Expr::Sub(x, y) => {
                x.write(f, names, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                y.write(f, names, 2)?;
            }
            Expr::Mul(x, y) | Expr::Div(x, y) => {
                x.write(f, names, 2)?;
                f.write_str(if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                y.write(f, names, 3)?;
            }
            Expr::Neg(x) => {
                f.write_str("-")?;
                x.write(f, names, 4)?;
            }
            Expr::Pow(x, n) => {
                x.write(f, names, 5)?;
                write!(f, "^{n}")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.expr.write(f, self.names, 1)
    }
}

/// A named map `name(inputs) = outputs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapExpr {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<Expr>,
}

impl MapExpr {
    pub fn parse(src: &str) -> std::result::Result<MapExpr, ParseError> {
        parse::parse_map(src)
    }

    /// Builds a map from parts; variable indices must be below `inputs.len()`.
    pub fn new(name: impl Into<String>, inputs: Vec<String>, outputs: Vec<Expr>) -> MapExpr {
        assert!(!inputs.is_empty() && !outputs.is_empty(), "maps need inputs and outputs");
        MapExpr { name: name.into(), inputs, outputs }
    }

    /// `id(x1, ..., xn) = x1, ..., xn`.
    pub fn identity(n: usize) -> MapExpr {
        MapExpr::new("id", default_names(n, "x"), (0..n).map(Expr::Var).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Expr] {
        &self.outputs
    }

    pub fn arity_in(&self) -> usize {
        self.inputs.len()
    }

    pub fn arity_out(&self) -> usize {
        self.outputs.len()
    }

    pub fn has_division(&self) -> bool {
        self.outputs.iter().any(Expr::has_division)
    }

    /// Evaluates every output at `point`. All coordinates must share one ring.
    ///
    /// A denominator that is not a unit yields [`Error::Domain`] naming the
    /// offending subexpression.
    pub fn eval(&self, point: &[RingElement]) -> Result<Vec<RingElement>> {
        if point.len() != self.arity_in() {
            return Err(Error::ArityMismatch { expected: self.arity_in(), got: point.len() });
        }
        self.outputs.iter().map(|e| self.eval_expr(e, point)).collect()
    }

    fn eval_expr(&self, e: &Expr, point: &[RingElement]) -> Result<RingElement> {
        Ok(match e {
            Expr::Const(c) => point[0].owner().embed_bigint(c),
            Expr::Var(i) => point[*i].clone(),
            Expr::Add(x, y) => self.eval_expr(x, point)?.add(&self.eval_expr(y, point)?)?,
            Expr::Sub(x, y) => self.eval_expr(x, point)?.sub(&self.eval_expr(y, point)?)?,
            Expr::Mul(x, y) => self.eval_expr(x, point)?.mul(&self.eval_expr(y, point)?)?,
            Expr::Div(x, y) => {
                let num = self.eval_expr(x, point)?;
                let den = self.eval_expr(y, point)?;
                let Some(inv) = den.try_invert() else {
                    return Err(Error::Domain(DomainWitness {
                        subexpr: y.display(&self.inputs).to_string(),
                        value: den.to_string(),
                    }));
                };
                num.mul(&inv)?
            }
            Expr::Neg(x) => self.eval_expr(x, point)?.neg(),
            Expr::Pow(x, n) => self.eval_expr(x, point)?.pow(u64::from(*n))?,
        })
    }

    /// `g ∘ f`, defined when `g.arity_in() == f.arity_out()`.
    pub fn compose(g: &MapExpr, f: &MapExpr) -> Result<MapExpr> {
        if g.arity_in() != f.arity_out() {
            return Err(Error::ArityMismatch { expected: g.arity_in(), got: f.arity_out() });
        }
        let outputs = g.outputs.iter().map(|e| e.substitute(&f.outputs)).collect();
        Ok(MapExpr { name: format!("{}_{}", g.name, f.name), inputs: f.inputs.clone(), outputs })
    }

    /// `(g × f)(x, y) = (g(x), f(y))` on disjoint input blocks.
    pub fn product(g: &MapExpr, f: &MapExpr) -> MapExpr {
        let n = g.arity_in() + f.arity_in();
        let mut outputs = g.outputs.clone();
        outputs.extend(f.outputs.iter().map(|e| e.shift_vars(g.arity_in())));
        MapExpr { name: format!("{}x{}", g.name, f.name), inputs: default_names(n, "x"), outputs }
    }
}

fn default_names(n: usize, prefix: &str) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

impl fmt::Display for MapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) = ", self.name, self.inputs.join(", "))?;
        for (i, e) in self.outputs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", e.display(&self.inputs))?;
        }
        Ok(())
    }
}

impl FromStr for MapExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        MapExpr::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rational, RingDescriptor};

    #[test]
    fn parses_and_prints() {
        let f = MapExpr::parse("f(x,y)=x^2+3*x*y, 1/(1+x)").unwrap();
        assert_eq!(f.arity_in(), 2);
        assert_eq!(f.arity_out(), 2);
        assert_eq!(f.to_string(), "f(x, y) = x^2 + 3*x*y, 1/(1 + x)");
        let g = MapExpr::parse("g(x) = -x^2 - (x - 1) - -x").unwrap();
        assert_eq!(g.to_string(), "g(x) = -x^2 - (x - 1) - -x");
        let h = MapExpr::parse("h(x) = (-x)^3, x/(x*x), (x/x)/x").unwrap();
        assert_eq!(h.to_string(), "h(x) = (-x)^3, x/(x*x), x/x/x");
    }

    #[test]
    fn parse_errors() {
        let e = MapExpr::parse("f(x) = x +").unwrap_err();
        assert_eq!(e.offset, 10);
        for tok in ["natural", "identifier", "("] {
            assert!(e.expected.iter().any(|t| t == tok), "{e}");
        }
        let e = MapExpr::parse("f(x) = y").unwrap_err();
        assert_eq!(e.offset, 7);
        assert!(e.message.contains("unknown variable"));
        let e = MapExpr::parse("f(x, x) = x").unwrap_err();
        assert_eq!(e.offset, 5);
        assert!(MapExpr::parse("f(x) = x^y").is_err());
        assert!(MapExpr::parse("f(x) = --x").is_err());
        assert!(MapExpr::parse("f(x) = x $ 1").is_err());
        assert!(MapExpr::parse("f() = 1").is_err());
    }

    #[test]
    fn evaluates_over_rings() {
        let f = MapExpr::parse("f(x) = x^3 - 2*x + 1").unwrap();
        assert_eq!(f.eval(&[rational(3, 1)]).unwrap(), vec![rational(22, 1)]);
        let z5 = RingDescriptor::zmod(5).unwrap();
        assert_eq!(f.eval(&[z5.embed_int(3)]).unwrap(), vec![z5.embed_int(2)]);
        let g = MapExpr::parse("g(x, y) = x/y").unwrap();
        assert_eq!(g.eval(&[rational(1, 1), rational(2, 1)]).unwrap(), vec![rational(1, 2)]);
        assert_eq!(g.eval(&[rational(1, 1)]).unwrap_err().kind(), "ArityMismatch");
    }

    #[test]
    fn domain_error_names_denominator() {
        let f = MapExpr::parse("f(x) = 1/(x - 2)").unwrap();
        let Error::Domain(w) = f.eval(&[rational(2, 1)]).unwrap_err() else { panic!() };
        assert_eq!(w.subexpr, "x - 2");
        assert_eq!(w.value, "0");
    }

    #[test]
    fn compose_and_product() {
        let f = MapExpr::parse("f(x) = x + 1, x*x").unwrap();
        let g = MapExpr::parse("g(a, b) = a*b").unwrap();
        let gf = MapExpr::compose(&g, &f).unwrap();
        assert_eq!(gf.eval(&[rational(2, 1)]).unwrap(), vec![rational(12, 1)]);
        assert!(MapExpr::compose(&f, &f).is_err());
        let p = MapExpr::product(&g, &f);
        let out = p.eval(&[rational(2, 1), rational(3, 1), rational(5, 1)]).unwrap();
        assert_eq!(out, vec![rational(6, 1), rational(6, 1), rational(25, 1)]);
    }
}
