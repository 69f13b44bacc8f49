//! Generalized divided differences `f^<k>(v; s)` and the simplicial extension
//! `SJ^(s) f`, computed by finite differences for non-singular `s`.

use crate::algebra::{m_matrix, n_matrix, nodes_nonsingular};
use crate::error::{Error, Result};
use crate::expr::MapExpr;
use crate::ring::{slices_eq, RingDescriptor, RingElement};

/// A point of `K^n`.
pub type Point = Vec<RingElement>;

/// Scalars `(s_0, ..., s_k)` sharing one owner.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarTuple {
    entries: Vec<RingElement>,
}

impl ScalarTuple {
    pub fn new(entries: Vec<RingElement>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::LengthMismatch("empty scalar tuple".into()));
        };
        let owner = first.owner();
        if let Some(bad) = entries.iter().find(|e| e.owner() != owner) {
            return Err(Error::OwnerMismatch { left: owner.to_string(), right: bad.owner().to_string() });
        }
        Ok(ScalarTuple { entries })
    }

    /// `(0, ..., 0)` of length `k + 1`.
    pub fn zeros(ring: &RingDescriptor, k: usize) -> Self {
        ScalarTuple { entries: vec![ring.zero(); k + 1] }
    }

    pub fn entries(&self) -> &[RingElement] {
        &self.entries
    }

    pub fn order(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn ring(&self) -> RingDescriptor {
        self.entries[0].owner()
    }

    /// All pairwise differences are units.
    pub fn is_nonsingular(&self) -> bool {
        nodes_nonsingular(&self.entries).unwrap_or(false)
    }

    /// `s - t·(1, ..., 1)`.
    pub fn translate(&self, t: &RingElement) -> Result<Self> {
        let entries = self.entries.iter().map(|s| s.sub(t)).collect::<Result<_>>()?;
        Ok(ScalarTuple { entries })
    }

    /// The first `j + 1` entries.
    pub fn prefix(&self, j: usize) -> Self {
        ScalarTuple { entries: self.entries[..=j].to_vec() }
    }

    fn require_nonsingular(&self) -> Result<()> {
        if self.is_nonsingular() {
            Ok(())
        } else {
            Err(Error::NonsingularRequired(format!("s = ({}) has a non-invertible difference", join(&self.entries))))
        }
    }
}

/// Points `(v_0, ..., v_k)` of a common arity. Also used for the rows of
/// `SJ^(s) f (v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VecTuple {
    rows: Vec<Point>,
}

/// Rows `(f(v_0), f^<1>, ..., f^<k>)`.
pub type SJVector = VecTuple;

impl VecTuple {
    pub fn new(rows: Vec<Point>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::LengthMismatch("empty vector tuple".into()));
        };
        let arity = first.len();
        if arity == 0 {
            return Err(Error::LengthMismatch("points must have at least one coordinate".into()));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != arity) {
            return Err(Error::ArityMismatch { expected: arity, got: bad.len() });
        }
        Ok(VecTuple { rows })
    }

    /// One-dimensional tuple from scalars.
    pub fn scalars(values: Vec<RingElement>) -> Result<Self> {
        Self::new(values.into_iter().map(|v| vec![v]).collect())
    }

    pub fn rows(&self) -> &[Point] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Point> {
        self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.rows[0].len()
    }

    pub fn prefix(&self, j: usize) -> Self {
        VecTuple { rows: self.rows[..=j].to_vec() }
    }

    /// Rowwise difference.
    pub fn sub(&self, other: &VecTuple) -> Result<VecTuple> {
        if self.len() != other.len() || self.arity() != other.arity() {
            return Err(Error::LengthMismatch("tuples of different shape".into()));
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| point_sub(a, b)).collect::<Result<_>>()?;
        Ok(VecTuple { rows })
    }

    pub fn ring_eq(&self, other: &VecTuple) -> Result<bool> {
        if self.len() != other.len() {
            return Ok(false);
        }
        for (a, b) in self.rows.iter().zip(&other.rows) {
            if !slices_eq(a, b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(RingElement::is_zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows.iter().map(|r| serde_json::Value::Array(r.iter().map(RingElement::to_json).collect())).collect(),
        )
    }
}

pub(crate) fn point_sub(a: &[RingElement], b: &[RingElement]) -> Result<Point> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub(crate) fn point_add(a: &[RingElement], b: &[RingElement]) -> Result<Point> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub(crate) fn point_scale(c: &RingElement, a: &[RingElement]) -> Result<Point> {
    a.iter().map(|x| c.mul(x)).collect()
}

fn join(xs: &[RingElement]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn check_shapes(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<()> {
    if v.len() != s.entries.len() {
        return Err(Error::LengthMismatch(format!("{} vectors but {} scalars", v.len(), s.entries.len())));
    }
    if v.arity() != f.arity_in() {
        return Err(Error::ArityMismatch { expected: f.arity_in(), got: v.arity() });
    }
    Ok(())
}

/// Evaluation points `v_0 + Σ_{j<=i} ∏_{l<j} (s_i - s_l) v_j`, i.e. `M_s v`.
pub fn eval_points(v: &VecTuple, s: &ScalarTuple) -> Result<Vec<Point>> {
    if v.len() != s.entries.len() {
        return Err(Error::LengthMismatch(format!("{} vectors but {} scalars", v.len(), s.entries.len())));
    }
    m_matrix(&s.entries)?.apply(&v.rows)
}

/// `f^<k>(v; s) = Σ_i f(point_i) / ∏_{j != i} (s_i - s_j)`, with `k = len(s) - 1`.
pub fn divided_difference(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<Point> {
    check_shapes(f, v, s)?;
    s.require_nonsingular()?;
    let points = eval_points(v, s)?;
    let ring = s.ring();
    let mut acc = vec![ring.zero(); f.arity_out()];
    for (i, p) in points.iter().enumerate() {
        let mut denom = ring.one();
        for (j, sj) in s.entries.iter().enumerate() {
            if j != i {
                denom = denom.mul(&s.entries[i].sub(sj)?)?;
            }
        }
        let weight = denom.try_invert().ok_or(Error::NotInvertible)?;
        acc = point_add(&acc, &point_scale(&weight, &f.eval(p)?)?)?;
    }
    Ok(acc)
}

/// Same value as [`divided_difference`], by recursion on the order:
/// `f^<k>(v; s) = (f^<k-1>(v_0..v_{k-1}; s_0..s_{k-1})
///   - f^<k-1>(v_0..v_{k-2}, v_{k-1} + (s_k - s_{k-1}) v_k; s_0..s_{k-2}, s_k)) / (s_{k-1} - s_k)`.
pub fn divided_difference_rec(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<Point> {
    check_shapes(f, v, s)?;
    s.require_nonsingular()?;
    rec(f, &v.rows, &s.entries)
}

fn rec(f: &MapExpr, v: &[Point], s: &[RingElement]) -> Result<Point> {
    let k = s.len() - 1;
    if k == 0 {
        return f.eval(&v[0]);
    }
    let first = rec(f, &v[..k], &s[..k])?;
    let mut v2 = v[..k].to_vec();
    v2[k - 1] = point_add(&v[k - 1], &point_scale(&s[k].sub(&s[k - 1])?, &v[k])?)?;
    let mut s2 = s[..k].to_vec();
    s2[k - 1] = s[k].clone();
    let second = rec(f, &v2, &s2)?;
    let inv = s[k - 1].sub(&s[k])?.try_invert().ok_or(Error::NotInvertible)?;
    point_scale(&inv, &point_sub(&first, &second)?)
}

/// `SJ^(s) f (v) = N_s ∘ (×f) ∘ M_s (v)`.
pub fn sj_extension(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<SJVector> {
    check_shapes(f, v, s)?;
    let n = n_matrix(&s.entries)?;
    let images = eval_points(v, s)?.iter().map(|p| f.eval(p)).collect::<Result<Vec<_>>>()?;
    VecTuple::new(n.apply(&images)?)
}

/// Residuals `f(point_i) - (M_s · jet)_i` of the limited expansion for a given jet.
pub fn expansion_residual(f: &MapExpr, v: &VecTuple, s: &ScalarTuple, jet: &SJVector) -> Result<Vec<Point>> {
    check_shapes(f, v, s)?;
    let predicted = m_matrix(&s.entries)?.apply(&jet.rows)?;
    eval_points(v, s)?
        .iter()
        .zip(&predicted)
        .map(|(p, q)| point_sub(&f.eval(p)?, q))
        .collect()
}

/// [`expansion_residual`] with the jet from [`sj_extension`].
pub fn limited_expansion_residual(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<Vec<Point>> {
    let jet = sj_extension(f, v, s)?;
    expansion_residual(f, v, s, &jet)
}

/// `SJ(g∘f)(v) - SJ(g)(SJ(f)(v))`, rowwise.
pub fn chain_rule_residual(f: &MapExpr, g: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<SJVector> {
    let gf = MapExpr::compose(g, f)?;
    let lhs = sj_extension(&gf, v, s)?;
    let rhs = sj_extension(g, &sj_extension(f, v, s)?, s)?;
    lhs.sub(&rhs)
}
