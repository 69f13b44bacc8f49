//! Finite-dimensional quotient algebras: truncated polynomial rings
//! `K[X]/(X(X - s_1)...(X - s_k))` and the cubic algebras `A_k^t`, plus the
//! embedding of the former into the latter.

mod cubic;
pub(crate) mod linalg;
mod matrix;
mod truncated;

use std::sync::Arc;

pub use cubic::{parse_subset, subset_label, CubicAlgebra, CubicElement, RewriteOrder, Subset};
pub use matrix::{m_matrix, n_matrix, TriangularMatrix};
pub use truncated::{nodes_nonsingular, TruncatedPolyElement, TruncatedPolyRing};

use crate::error::{Error, Result};
use crate::ring::{slices_eq, RingDescriptor, RingElement};

/// Monic polynomial of least degree annihilating a quotient-ring element,
/// coefficients lowest degree first.
///
/// Found by Gaussian elimination on the powers `1, z, z², ...`, so the base
/// must be an exact field.
pub fn minimal_polynomial(z: &RingElement) -> Result<Vec<RingElement>> {
    let Some(coords) = z.coordinates() else {
        return Err(Error::ExactRingRequired("minimal polynomial needs a quotient-ring element".into()));
    };
    let base = coords[0].owner();
    if !base.is_exact() || !base.is_field() {
        return Err(Error::ExactRingRequired(format!("minimal polynomial over {base}")));
    }
    let n = coords.len();
    // echelon rows: (vector, combination of powers, pivot column)
    let mut rows: Vec<(Vec<RingElement>, Vec<RingElement>, usize)> = Vec::new();
    let mut power = z.owner().one();
    for d in 0..=n {
        let mut v = power.coordinates().expect("quotient element").to_vec();
        let mut comb = vec![base.zero(); n + 1];
        comb[d] = base.one();
        for (row, row_comb, pivot) in &rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let factor = v[*pivot].div(&row[*pivot])?;
            for (x, r) in v.iter_mut().zip(row) {
                *x = x.sub(&factor.mul(r)?)?;
            }
            for (x, r) in comb.iter_mut().zip(row_comb) {
                *x = x.sub(&factor.mul(r)?)?;
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            None => {
                comb.truncate(d + 1);
                return Ok(comb);
            }
            Some(pivot) => rows.push((v, comb, pivot)),
        }
        power = power.mul(z)?;
    }
    unreachable!("n + 1 vectors in an n-dimensional space are dependent")
}

/// Result of embedding `B_k^s` into `A_k^{t(s)}` as the subring generated by `X_k`.
#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    pub algebra: Arc<CubicAlgebra>,
    pub minimal_polynomial: Vec<RingElement>,
    pub defining_polynomial: Vec<RingElement>,
    pub matches: bool,
}

/// Cubic parameters `t(s)`: `t_{j} = s_{k-j+1} - s_{k-j}`, `t_{i,i+1} = 1`,
/// all other `t_J = 0`. `s_0` is translated to zero first.
pub fn embedding_parameters(s: &[RingElement]) -> Result<Arc<CubicAlgebra>> {
    let ring = TruncatedPolyRing::from_scalars(s)?;
    let nodes = ring.nodes();
    let k = ring.k();
    let base = ring.base().clone();
    let mut pairs = Vec::new();
    for j in 1..=k {
        pairs.push((1 << (j - 1), nodes[k - j + 1].sub(&nodes[k - j])?));
    }
    for i in 1..k {
        pairs.push((1 << (i - 1) | 1 << i, base.one()));
    }
    CubicAlgebra::from_pairs(base, k, &pairs)
}

/// Builds `t(s)` and checks that the minimal polynomial of `X_k` in `A_k^{t(s)}`
/// equals `X (X - s_1) ... (X - s_k)`.
pub fn embed_simplicial_in_cubic(s: &[RingElement]) -> Result<EmbeddingReport> {
    let algebra = embedding_parameters(s)?;
    let ring = TruncatedPolyRing::from_scalars(s)?;
    let xk = RingElement::Cubic(algebra.basis(1 << (algebra.k() - 1)));
    let minimal = minimal_polynomial(&xk)?;
    let defining = ring.defining_polynomial().to_vec();
    let matches = slices_eq(&minimal, &defining)?;
    Ok(EmbeddingReport { algebra, minimal_polynomial: minimal, defining_polynomial: defining, matches })
}

/// Projection `B_k^s -> K`, `[P] ↦ P(0)`, used to check that evaluation commutes
/// with ring homomorphisms.
pub fn base_projection(e: &RingElement) -> Option<RingElement> {
    match e {
        RingElement::Simplicial(p) => Some(p.base_projection()),
        RingElement::Cubic(c) => Some(c.coeffs()[0].clone()),
        _ => None,
    }
}

/// Base ring of a quotient descriptor (the descriptor itself for base rings).
pub fn base_of(desc: &RingDescriptor) -> RingDescriptor {
    match desc {
        RingDescriptor::Simplicial(r) => r.base().clone(),
        RingDescriptor::Cubic(a) => a.base().clone(),
        other => other.clone(),
    }
}
