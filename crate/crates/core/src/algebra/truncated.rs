use std::sync::Arc;

use serde_json::json;

use super::linalg;
use crate::error::{Error, Result};
use crate::ring::{RingDescriptor, RingElement};

/// `K[X] / (X (X - s_1) ... (X - s_k))`, stored in the monomial basis.
///
/// The shift `s_0` is normalized to zero; [`TruncatedPolyRing::from_scalars`]
/// subtracts it from a full tuple `(s_0, ..., s_k)`.
#[derive(Debug)]
pub struct TruncatedPolyRing {
    base: RingDescriptor,
    shifts: Vec<RingElement>,
    // monic defining polynomial, lowest degree first, length k + 2
    modulus: Vec<RingElement>,
}

impl PartialEq for TruncatedPolyRing {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.shifts == other.shifts
    }
}

impl TruncatedPolyRing {
    pub fn new(base: RingDescriptor, shifts: Vec<RingElement>) -> Result<Arc<Self>> {
        if shifts.is_empty() {
            return Err(Error::LengthMismatch("truncated polynomial ring needs k >= 1".into()));
        }
        for s in &shifts {
            if s.owner() != base {
                return Err(Error::OwnerMismatch { left: base.to_string(), right: s.owner().to_string() });
            }
        }
        // P(X) = X * prod (X - s_i)
        let mut p = vec![base.zero(), base.one()];
        for s in &shifts {
            let mut next = vec![base.zero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                next[i + 1] = next[i + 1].add(c)?;
                next[i] = next[i].sub(&c.mul(s)?)?;
            }
            p = next;
        }
        Ok(Arc::new(TruncatedPolyRing { base, shifts, modulus: p }))
    }

    /// Builds the ring for a full tuple `(s_0, ..., s_k)`, translating `s_0` to zero.
    pub fn from_scalars(s: &[RingElement]) -> Result<Arc<Self>> {
        let Some(s0) = s.first() else {
            return Err(Error::LengthMismatch("empty scalar tuple".into()));
        };
        let shifts = s[1..].iter().map(|si| si.sub(s0)).collect::<Result<Vec<_>>>()?;
        Self::new(s0.owner(), shifts)
    }

    pub fn base(&self) -> &RingDescriptor {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.shifts.len()
    }

    pub fn dimension(&self) -> usize {
        self.shifts.len() + 1
    }

    pub fn shifts(&self) -> &[RingElement] {
        &self.shifts
    }

    /// Coefficients of `X (X - s_1) ... (X - s_k)`, lowest degree first.
    pub fn defining_polynomial(&self) -> &[RingElement] {
        &self.modulus
    }

    /// All nodes `0, s_1, ..., s_k`.
    pub fn nodes(&self) -> Vec<RingElement> {
        std::iter::once(self.base.zero()).chain(self.shifts.iter().cloned()).collect()
    }

    pub fn is_nonsingular(&self) -> bool {
        nodes_nonsingular(&self.nodes()).unwrap_or(false)
    }

    pub fn descriptor(self: &Arc<Self>) -> RingDescriptor {
        RingDescriptor::Simplicial(self.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut s = vec![self.base.zero().to_json()];
        s.extend(self.shifts.iter().map(RingElement::to_json));
        json!({"type": "bpoly", "base": self.base.to_json(), "s": s})
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<RingElement>) -> Result<TruncatedPolyElement> {
        if coeffs.len() != self.dimension() {
            return Err(Error::LengthMismatch(format!(
                "expected {} coefficients, got {}",
                self.dimension(),
                coeffs.len()
            )));
        }
        for c in &coeffs {
            if c.owner() != self.base {
                return Err(Error::OwnerMismatch { left: self.base.to_string(), right: c.owner().to_string() });
            }
        }
        Ok(TruncatedPolyElement { ring: self.clone(), coeffs })
    }

    pub fn constant(self: &Arc<Self>, c: RingElement) -> TruncatedPolyElement {
        let mut coeffs = vec![self.base.zero(); self.dimension()];
        coeffs[0] = c;
        TruncatedPolyElement { ring: self.clone(), coeffs }
    }

    /// The class of `X`.
    pub fn generator(self: &Arc<Self>) -> TruncatedPolyElement {
        let mut coeffs = vec![self.base.zero(); self.dimension()];
        coeffs[1] = self.base.one();
        TruncatedPolyElement { ring: self.clone(), coeffs }
    }

    /// Monomial coefficients of the c-basis polynomial `c_j(X) = X (X - s_1) ... (X - s_{j-1})`
    /// (with `c_0 = 1`), i.e. the product over the first `j` nodes.
    pub fn c_basis_polynomial(&self, j: usize) -> Result<Vec<RingElement>> {
        let nodes = self.nodes();
        let mut p = vec![self.base.one()];
        for node in &nodes[..j] {
            let mut next = vec![self.base.zero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                next[i + 1] = next[i + 1].add(c)?;
                next[i] = next[i].sub(&c.mul(node)?)?;
            }
            p = next;
        }
        Ok(p)
    }

    /// Element with the given c-basis coordinates `(v_0, ..., v_k)`.
    pub fn from_c_coords(self: &Arc<Self>, coords: &[RingElement]) -> Result<TruncatedPolyElement> {
        if coords.len() != self.dimension() {
            return Err(Error::LengthMismatch(format!(
                "expected {} c-coordinates, got {}",
                self.dimension(),
                coords.len()
            )));
        }
        let mut coeffs = vec![self.base.zero(); self.dimension()];
        for (j, v) in coords.iter().enumerate() {
            for (i, c) in self.c_basis_polynomial(j)?.iter().enumerate() {
                coeffs[i] = coeffs[i].add(&c.mul(v)?)?;
            }
        }
        self.element(coeffs)
    }

    /// Reduces a polynomial of arbitrary degree modulo the defining polynomial.
    pub(crate) fn reduce(&self, mut poly: Vec<RingElement>) -> Result<Vec<RingElement>> {
        let n = self.dimension();
        // X^{k+1} = -(p_0 + p_1 X + ... + p_k X^k)
        while poly.len() > n {
            let top = poly.pop().expect("nonempty");
            let shift = poly.len() - n;
            if top.is_zero() {
                continue;
            }
            for (i, p) in self.modulus[..n].iter().enumerate() {
                poly[shift + i] = poly[shift + i].sub(&top.mul(p)?)?;
            }
        }
        while poly.len() < n {
            poly.push(self.base.zero());
        }
        Ok(poly)
    }

    pub(crate) fn mul_coeffs(&self, a: &[RingElement], b: &[RingElement]) -> Result<Vec<RingElement>> {
        let mut prod = vec![self.base.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = prod[i + j].add(&x.mul(y)?)?;
            }
        }
        self.reduce(prod)
    }

    /// Lagrange idempotents `E_i` with `E_i(s_j) = δ_ij`, for non-singular shifts.
    pub fn idempotent_basis(self: &Arc<Self>) -> Result<Vec<TruncatedPolyElement>> {
        let nodes = self.nodes();
        if !nodes_nonsingular(&nodes)? {
            return Err(Error::NonsingularRequired(
                "idempotent basis needs pairwise invertible node differences".into(),
            ));
        }
        let mut out = Vec::with_capacity(nodes.len());
        for (i, si) in nodes.iter().enumerate() {
            let mut p = vec![self.base.one()];
            for (j, sj) in nodes.iter().enumerate() {
                if i == j {
                    continue;
                }
                let denom = si.sub(sj)?.try_invert().ok_or(Error::NotInvertible)?;
                let mut next = vec![self.base.zero(); p.len() + 1];
                for (d, c) in p.iter().enumerate() {
                    let c = c.mul(&denom)?;
                    next[d + 1] = next[d + 1].add(&c)?;
                    next[d] = next[d].sub(&c.mul(sj)?)?;
                }
                p = next;
            }
            out.push(self.element(p)?);
        }
        Ok(out)
    }
}

/// Whether all pairwise differences of `nodes` are units.
pub fn nodes_nonsingular(nodes: &[RingElement]) -> Result<bool> {
    for i in 0..nodes.len() {
        for j in i + 1..nodes.len() {
            if !nodes[i].sub(&nodes[j])?.is_unit() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPolyElement {
    ring: Arc<TruncatedPolyRing>,
    coeffs: Vec<RingElement>,
}

impl TruncatedPolyElement {
    pub fn ring(&self) -> &Arc<TruncatedPolyRing> {
        &self.ring
    }

    /// Coefficients in the monomial basis `1, X, ..., X^k`.
    pub fn coeffs(&self) -> &[RingElement] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::OwnerMismatch { left: self.ring.to_json().to_string(), right: other.ring.to_json().to_string() })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(TruncatedPolyElement { ring: self.ring.clone(), coeffs })
    }

    pub fn neg(&self) -> Self {
        TruncatedPolyElement { ring: self.ring.clone(), coeffs: self.coeffs.iter().map(RingElement::neg).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.ring.mul_coeffs(&self.coeffs, &other.coeffs)?;
        Ok(TruncatedPolyElement { ring: self.ring.clone(), coeffs })
    }

    pub fn scale(&self, c: &RingElement) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|a| a.mul(c)).collect::<Result<_>>()?;
        Ok(TruncatedPolyElement { ring: self.ring.clone(), coeffs })
    }

    /// Coordinates in the c-basis; the inverse of [`TruncatedPolyRing::from_c_coords`].
    pub fn to_c_coords(&self) -> Result<Vec<RingElement>> {
        let ring = &self.ring;
        let n = ring.dimension();
        let mut rest = self.coeffs.clone();
        let mut coords = vec![ring.base.zero(); n];
        // c_j is monic of degree j, so peel off from the top
        for j in (0..n).rev() {
            let v = rest[j].clone();
            if v.is_zero() {
                continue;
            }
            for (i, c) in ring.c_basis_polynomial(j)?.iter().enumerate() {
                rest[i] = rest[i].sub(&c.mul(&v)?)?;
            }
            coords[j] = v;
        }
        Ok(coords)
    }

    /// Value of the class at `X = 0`: the projection onto the base ring.
    pub fn base_projection(&self) -> RingElement {
        self.coeffs[0].clone()
    }

    /// Matrix of multiplication by `self` in the monomial basis (column j is `self * X^j`).
    pub fn multiplication_matrix(&self) -> Result<linalg::Matrix> {
        let n = self.ring.dimension();
        let base = &self.ring.base;
        let mut m = vec![vec![base.zero(); n]; n];
        let mut col = self.coeffs.clone();
        let x = self.ring.generator();
        for j in 0..n {
            for i in 0..n {
                m[i][j] = col[i].clone();
            }
            if j + 1 < n {
                col = self.ring.mul_coeffs(&col, x.coeffs())?;
            }
        }
        Ok(m)
    }

    pub fn try_invert(&self) -> Option<Self> {
        self.try_invert_inner().ok().flatten()
    }

    fn try_invert_inner(&self) -> Result<Option<Self>> {
        let n = self.ring.dimension();
        let base = &self.ring.base;
        let m = self.multiplication_matrix()?;
        let mut one = vec![base.zero(); n];
        one[0] = base.one();
        let sol = match linalg::solve(m.clone(), one.clone())? {
            Some(sol) => Some(sol),
            None if base.is_field() => None,
            None => linalg::inverse_by_charpoly(base, &m, &self.coeffs, &one, |a, b| self.ring.mul_coeffs(a, b))?,
        };
        Ok(sol.map(|coeffs| TruncatedPolyElement { ring: self.ring.clone(), coeffs }))
    }

    fn require_k1(&self) -> Result<(RingElement, RingElement, RingElement)> {
        if self.ring.k() != 1 {
            return Err(Error::LengthMismatch(format!("expected a k=1 ring, got k={}", self.ring.k())));
        }
        Ok((self.coeffs[0].clone(), self.coeffs[1].clone(), self.ring.shifts[0].clone()))
    }

    /// Trace `2a + tb` of `z = a + bω` in `K[ω]/(ω² - tω)`.
    pub fn kt_trace(&self) -> Result<RingElement> {
        let (a, b, t) = self.require_k1()?;
        a.add(&a)?.add(&t.mul(&b)?)
    }

    /// Determinant `a² + tab`; `z` is a unit exactly when this is.
    pub fn kt_det(&self) -> Result<RingElement> {
        let (a, b, t) = self.require_k1()?;
        a.mul(&a)?.add(&t.mul(&a)?.mul(&b)?)
    }

    /// Conjugate `a + bt - bω`, induced by the root exchange `X ↦ t - X`.
    pub fn kt_conjugate(&self) -> Result<Self> {
        let (a, b, t) = self.require_k1()?;
        self.ring.element(vec![a.add(&b.mul(&t)?)?, b.neg()])
    }

    /// `z̄ / det(z)`.
    pub fn kt_invert(&self) -> Result<Self> {
        let det_inv = self.kt_det()?.try_invert().ok_or(Error::NotInvertible)?;
        self.kt_conjugate()?.scale(&det_inv)
    }
}
