//! Test oracles that work on expression trees directly, independent of the
//! quotient-ring machinery.
#![allow(dead_code)]

use divcalc::expr::{Expr, MapExpr};

fn zero(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if c == &0.into())
}

fn one(e: &Expr) -> bool {
    matches!(e, Expr::Const(c) if c == &1.into())
}

fn add(a: Expr, b: Expr) -> Expr {
    match (zero(&a), zero(&b)) {
        (true, _) => b,
        (_, true) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (zero(&a), zero(&b)) {
        (_, true) => a,
        (true, _) => Expr::Neg(Box::new(b)),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if zero(&a) || zero(&b) {
        return Expr::constant(0);
    }
    match (one(&a), one(&b)) {
        (true, _) => b,
        (_, true) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

/// `∂e/∂x_var`.
pub fn partial(e: &Expr, var: usize) -> Expr {
    match e {
        Expr::Const(_) => Expr::constant(0),
        Expr::Var(i) => Expr::constant(i64::from(*i == var)),
        Expr::Add(a, b) => add(partial(a, var), partial(b, var)),
        Expr::Sub(a, b) => sub(partial(a, var), partial(b, var)),
        Expr::Mul(a, b) => add(mul(partial(a, var), (**b).clone()), mul((**a).clone(), partial(b, var))),
        Expr::Div(a, b) => {
            let num = sub(mul(partial(a, var), (**b).clone()), mul((**a).clone(), partial(b, var)));
            if zero(&num) {
                return num;
            }
            Expr::Div(Box::new(num), Box::new(Expr::Pow(b.clone(), 2)))
        }
        Expr::Neg(a) => {
            let d = partial(a, var);
            if zero(&d) { d } else { Expr::Neg(Box::new(d)) }
        }
        Expr::Pow(a, n) => match n {
            0 => Expr::constant(0),
            1 => partial(a, var),
            _ => {
                let outer = mul(Expr::constant(i64::from(*n)), Expr::Pow(a.clone(), n - 1));
                mul(outer, partial(a, var))
            }
        },
    }
}

/// Directional derivative `Σ_i h_i ∂e/∂x_i`, with `h_i` the variable `n + i`.
pub fn directional(e: &Expr, n: usize) -> Expr {
    (0..n).fold(Expr::constant(0), |acc, i| add(acc, mul(Expr::Var(n + i), partial(e, i))))
}

/// The map `(x, h) ↦ d^j f(x)(h, ..., h)` for each output of `f`.
pub fn iterated_directional(f: &MapExpr, j: usize) -> MapExpr {
    let n = f.arity_in();
    let mut names = f.inputs().to_vec();
    names.extend((1..=n).map(|i| format!("h{i}")));
    let outputs = f
        .outputs()
        .iter()
        .map(|e| (0..j).fold(e.clone(), |acc, _| directional(&acc, n)))
        .collect();
    MapExpr::new(format!("d{j}{}", f.name()), names, outputs)
}
