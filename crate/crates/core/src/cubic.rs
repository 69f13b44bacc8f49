//! Cubic difference quotients `f^[k]` and the cubic extension `T^(t) f`,
//! with point and parameter families indexed by subsets of `{1, ..., k}`.
//!
//! Subsets are bit masks: element `j` is bit `j - 1`, so the family
//! `(x_∅, x_1, x_2, x_{1,2}, x_3, ...)` is stored in counting order.

use crate::algebra::subset_label;
use crate::error::{Error, Result};
use crate::expr::MapExpr;
use crate::ring::{slices_eq, RingElement};
use crate::simplicial::{divided_difference, point_add, point_scale, point_sub, Point, ScalarTuple, VecTuple};

/// Largest order accepted by the finite-difference recursion.
pub const MAX_ORDER: usize = 4;

/// Sign `σ_k` in `f^<k>(v; s) = σ_k f^[k](g_k(v; s))`, for `k = 1..=MAX_ORDER`.
pub const SIGNS: [i8; MAX_ORDER] = [1, 1, 1, 1];

/// Points `x_J` for all `J ⊆ {1..k}` and scalars `t_J` for non-empty `J`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicArg {
    order: usize,
    vectors: Vec<Point>,
    // indexed by mask; entry 0 is unused and held at zero
    scalars: Vec<RingElement>,
}

impl CubicArg {
    /// `vectors` has `2^k` entries; `scalars` has `2^k` entries with `scalars[0]` ignored.
    pub fn new(vectors: Vec<Point>, mut scalars: Vec<RingElement>) -> Result<Self> {
        let n = vectors.len();
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::LengthMismatch(format!("{n} vectors is not 2^k with k >= 1")));
        }
        let order = n.trailing_zeros() as usize;
        if order > MAX_ORDER {
            return Err(Error::OrderOutOfRange { order, min: 1, max: MAX_ORDER });
        }
        if scalars.len() != n {
            return Err(Error::LengthMismatch(format!("expected {n} scalar slots, got {}", scalars.len())));
        }
        let arity = vectors[0].len();
        if let Some(bad) = vectors.iter().find(|p| p.len() != arity) {
            return Err(Error::ArityMismatch { expected: arity, got: bad.len() });
        }
        scalars[0] = scalars[1].owner().zero();
        Ok(CubicArg { order, vectors, scalars })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vectors(&self) -> &[Point] {
        &self.vectors
    }

    pub fn scalars(&self) -> &[RingElement] {
        &self.scalars
    }

    pub fn vector(&self, mask: usize) -> &Point {
        &self.vectors[mask]
    }

    pub fn scalar(&self, mask: usize) -> &RingElement {
        &self.scalars[mask]
    }
}

fn invert_step(t: &RingElement, level: usize) -> Result<RingElement> {
    t.try_invert()
        .ok_or_else(|| Error::NonsingularRequired(format!("t_{{{}}} = {t} is not invertible", subset_label(level))))
}

/// Splits a level-`k` family into the level-`k-1` data at `a` and at `a + t_k b`
/// (parameters shifted to `t_J + t_k t_{J∪{k}}`).
#[allow(clippy::type_complexity)]
fn split(x: &[Point], t: &[RingElement]) -> Result<((Vec<Point>, Vec<RingElement>), (Vec<Point>, Vec<RingElement>))> {
    let half = x.len() / 2;
    let tk = &t[half];
    let moved = (0..half).map(|j| point_add(&x[j], &point_scale(tk, &x[j + half])?)).collect::<Result<Vec<_>>>()?;
    let mut shifted = t[..half].to_vec();
    for j in 1..half {
        shifted[j] = t[j].add(&tk.mul(&t[j + half])?)?;
    }
    Ok(((x[..half].to_vec(), t[..half].to_vec()), (moved, shifted)))
}

/// `f^[1](x, h, t) = (f(x + t h) - f(x)) / t`.
pub fn diff_quotient1(f: &MapExpr, x: &[RingElement], h: &[RingElement], t: &RingElement) -> Result<Point> {
    let inv = invert_step(t, 1)?;
    let moved = point_add(x, &point_scale(t, h)?)?;
    point_scale(&inv, &point_sub(&f.eval(&moved)?, &f.eval(x)?)?)
}

/// `f^[k] = (f^[k-1])^[1]`, evaluated at the full family of `arg`.
pub fn diff_quotient_k(f: &MapExpr, arg: &CubicArg) -> Result<Point> {
    check_arity(f, arg)?;
    top(f, &arg.vectors, &arg.scalars)
}

fn top(f: &MapExpr, x: &[Point], t: &[RingElement]) -> Result<Point> {
    if x.len() == 1 {
        return f.eval(&x[0]);
    }
    let half = x.len() / 2;
    let inv = invert_step(&t[half], half)?;
    let ((a, ta), (b, tb)) = split(x, t)?;
    point_scale(&inv, &point_sub(&top(f, &b, &tb)?, &top(f, &a, &ta)?)?)
}

fn check_arity(f: &MapExpr, arg: &CubicArg) -> Result<()> {
    if arg.vectors[0].len() != f.arity_in() {
        return Err(Error::ArityMismatch { expected: f.arity_in(), got: arg.vectors[0].len() });
    }
    Ok(())
}

/// The closed form of `f^[2]((x, v_1, t_1), (v_2, v_12, t_12), t_2)`:
///
/// ```text
/// (f(x + t2 v2 + (t1 + t2 t12)(v1 + t2 v12)) - f(x + t2 v2)) / (t2 (t1 + t2 t12))
///   - (f(x + t1 v1) - f(x)) / (t1 t2)
/// ```
pub fn f2_explicit(f: &MapExpr, arg: &CubicArg) -> Result<Point> {
    if arg.order != 2 {
        return Err(Error::OrderOutOfRange { order: arg.order, min: 2, max: 2 });
    }
    check_arity(f, arg)?;
    let [x, v1, v2, v12] = [0, 1, 2, 3].map(|m| &arg.vectors[m]);
    let [t1, t2, t12] = [1, 2, 3].map(|m| &arg.scalars[m]);
    let t1s = t1.add(&t2.mul(t12)?)?;
    let base = point_add(x, &point_scale(t2, v2)?)?;
    let far = point_add(&base, &point_scale(&t1s, &point_add(v1, &point_scale(t2, v12)?)?)?)?;
    let near = point_add(x, &point_scale(t1, v1)?)?;
    let d1 = invert_step(&t2.mul(&t1s)?, 3)?;
    let d2 = invert_step(&t1.mul(t2)?, 3)?;
    let first = point_scale(&d1, &point_sub(&f.eval(&far)?, &f.eval(&base)?)?)?;
    let second = point_scale(&d2, &point_sub(&f.eval(&near)?, &f.eval(x)?)?)?;
    point_sub(&first, &second)
}

/// `T^(t) f`: component `J` is the `f^[|J|]`-type quotient in the directions of `J`.
pub fn t_extension(f: &MapExpr, arg: &CubicArg) -> Result<Vec<Point>> {
    check_arity(f, arg)?;
    extend(f, &arg.vectors, &arg.scalars)
}

fn extend(f: &MapExpr, x: &[Point], t: &[RingElement]) -> Result<Vec<Point>> {
    if x.len() == 1 {
        return Ok(vec![f.eval(&x[0])?]);
    }
    let half = x.len() / 2;
    let inv = invert_step(&t[half], half)?;
    let ((a, ta), (b, tb)) = split(x, t)?;
    let lo = extend(f, &a, &ta)?;
    let hi = extend(f, &b, &tb)?;
    let mut out = lo.clone();
    for (h, l) in hi.iter().zip(&lo) {
        out.push(point_scale(&inv, &point_sub(h, l)?)?);
    }
    Ok(out)
}

/// The affine map `g_k`: `x_∅ = v_0`, `x_{1..j} = v_j`, `t_j = s_j - s_{j-1}`,
/// `t_{j,j+1} = 1`, all other entries zero.
pub fn embedding_arg(v: &VecTuple, s: &ScalarTuple) -> Result<CubicArg> {
    let k = s.order();
    if k == 0 || k > MAX_ORDER {
        return Err(Error::OrderOutOfRange { order: k, min: 1, max: MAX_ORDER });
    }
    if v.len() != k + 1 {
        return Err(Error::LengthMismatch(format!("{} vectors for order {k}", v.len())));
    }
    let ring = s.ring();
    let n = 1 << k;
    let mut vectors = vec![vec![ring.zero(); v.arity()]; n];
    let mut scalars = vec![ring.zero(); n];
    let e = s.entries();
    for j in 0..=k {
        vectors[(1 << j) - 1] = v.rows()[j].clone();
    }
    for j in 1..=k {
        scalars[1 << (j - 1)] = e[j].sub(&e[j - 1])?;
        if j < k {
            scalars[(1 << (j - 1)) | (1 << j)] = ring.one();
        }
    }
    CubicArg::new(vectors, scalars)
}

/// `f^<k>(v; s)` computed as `σ_k f^[k](g_k(v; s))`.
pub fn simplicial_via_cubic(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<Point> {
    let arg = embedding_arg(v, s)?;
    let value = diff_quotient_k(f, &arg)?;
    Ok(if SIGNS[arg.order - 1] < 0 { value.iter().map(RingElement::neg).collect() } else { value })
}

/// Outcome of comparing `f^<k>(v; s)` with `f^[k](g_k(v; s))` on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignVerdict {
    Plus,
    Minus,
    /// Both sides vanish (or agree up to either sign), so the instance fixes nothing.
    Indeterminate,
    /// The two sides differ by something other than a sign.
    Contradiction,
}

impl SignVerdict {
    pub fn sign(self) -> Option<i8> {
        match self {
            SignVerdict::Plus => Some(1),
            SignVerdict::Minus => Some(-1),
            _ => None,
        }
    }
}

/// Determines the sign relating the simplicial and cubic quotients from scratch,
/// without consulting [`SIGNS`].
pub fn determine_sign(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<SignVerdict> {
    let simplicial = divided_difference(f, v, s)?;
    let cubic = diff_quotient_k(f, &embedding_arg(v, s)?)?;
    let negated: Point = cubic.iter().map(RingElement::neg).collect();
    let plus = slices_eq(&simplicial, &cubic)?;
    let minus = slices_eq(&simplicial, &negated)?;
    Ok(match (plus, minus) {
        (true, true) => SignVerdict::Indeterminate,
        (true, false) => SignVerdict::Plus,
        (false, true) => SignVerdict::Minus,
        (false, false) => SignVerdict::Contradiction,
    })
}
