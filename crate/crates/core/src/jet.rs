//! Jets by scalar extension: lift the inputs into a truncated polynomial ring
//! or a cubic algebra, evaluate the expression there and read off coordinates.
//! Works for every parameter choice, singular ones included.

use std::sync::Arc;

use crate::algebra::{CubicAlgebra, TruncatedPolyRing};
use crate::cubic::CubicArg;
use crate::error::{DomainWitness, Error, Result};
use crate::expr::MapExpr;
use crate::ring::RingElement;
use crate::simplicial::{Point, SJVector, ScalarTuple, VecTuple};

/// `SJ^(s) f (v)` computed in `B^s_k`, using c-basis coordinates on both sides.
pub fn sj_via_ring(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<SJVector> {
    let ring = lift_ring(f, v, s)?;
    let lifted = lift_simplicial(&ring, v)?;
    let images = f.eval(&lifted)?;
    let mut rows = vec![Vec::with_capacity(images.len()); v.len()];
    for image in &images {
        let RingElement::Simplicial(e) = image else { unreachable!("evaluation stays in the lifted ring") };
        for (row, c) in rows.iter_mut().zip(e.to_c_coords()?) {
            row.push(c);
        }
    }
    VecTuple::new(rows)
}

fn lift_ring(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<Arc<TruncatedPolyRing>> {
    if s.order() == 0 {
        return Err(Error::OrderOutOfRange { order: 0, min: 1, max: usize::MAX });
    }
    if v.len() != s.order() + 1 {
        return Err(Error::LengthMismatch(format!("{} vectors but {} scalars", v.len(), s.order() + 1)));
    }
    if v.arity() != f.arity_in() {
        return Err(Error::ArityMismatch { expected: f.arity_in(), got: v.arity() });
    }
    TruncatedPolyRing::from_scalars(s.entries())
}

fn lift_simplicial(ring: &Arc<TruncatedPolyRing>, v: &VecTuple) -> Result<Vec<RingElement>> {
    (0..v.arity())
        .map(|i| {
            let coords: Vec<_> = v.rows().iter().map(|row| row[i].clone()).collect();
            Ok(RingElement::Simplicial(ring.from_c_coords(&coords)?))
        })
        .collect()
}

/// Reverses the order of `{1..k}` inside a mask.
fn reverse_mask(mask: usize, k: usize) -> usize {
    mask.reverse_bits() >> (usize::BITS as usize - k)
}

/// `T^(t) f (x)` computed in `A^t_k`.
///
/// The algebra's tower adjoins `X_k` first, while the finite-difference
/// recursion differentiates in direction `k` last, so subsets are relabelled
/// by `j ↦ k + 1 - j` on the way in and out.
pub fn t_via_ring(f: &MapExpr, arg: &CubicArg) -> Result<Vec<Point>> {
    let k = arg.order();
    let n = 1usize << k;
    if arg.vectors()[0].len() != f.arity_in() {
        return Err(Error::ArityMismatch { expected: f.arity_in(), got: arg.vectors()[0].len() });
    }
    let base = arg.scalar(1).owner();
    let mut params = vec![base.zero(); n];
    for (mask, t) in arg.scalars().iter().enumerate().skip(1) {
        params[reverse_mask(mask, k)] = t.clone();
    }
    let algebra = CubicAlgebra::new(base, k, params)?;
    let lifted = (0..f.arity_in())
        .map(|i| {
            let mut coeffs = vec![algebra.base().zero(); n];
            for (mask, x) in arg.vectors().iter().enumerate() {
                coeffs[reverse_mask(mask, k)] = x[i].clone();
            }
            Ok(RingElement::Cubic(algebra.element(coeffs)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let images = f.eval(&lifted)?;
    let mut out = vec![Vec::with_capacity(images.len()); n];
    for image in &images {
        let RingElement::Cubic(e) = image else { unreachable!("evaluation stays in the lifted algebra") };
        for (mask, c) in e.coeffs().iter().enumerate() {
            out[reverse_mask(mask, k)].push(c.clone());
        }
    }
    Ok(out)
}

/// Radial Taylor coefficients `a_j(x, h)`, `j = 0..=k`: the jet of `f` at
/// `v = (x, h, 0, ..., 0)`, `s = 0`.
pub fn taylor_coeffs(f: &MapExpr, x: &[RingElement], h: &[RingElement], k: usize) -> Result<Vec<Point>> {
    if x.is_empty() || x.len() != h.len() {
        return Err(Error::LengthMismatch("base point and direction differ in length".into()));
    }
    let ring = x[0].owner();
    let mut rows = vec![x.to_vec(), h.to_vec()];
    rows.resize(k + 1, vec![ring.zero(); x.len()]);
    rows.truncate(k + 1);
    if k == 0 {
        return Ok(vec![f.eval(x)?]);
    }
    let jet = sj_via_ring(f, &VecTuple::new(rows)?, &ScalarTuple::zeros(&ring, k))?;
    Ok(jet.into_rows())
}

/// Whether a lifted evaluation succeeds; on failure, the failing denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainVerdict {
    pub inside: bool,
    pub witness: Option<DomainWitness>,
}

fn verdict<T>(r: Result<T>) -> Result<DomainVerdict> {
    match r {
        Ok(_) => Ok(DomainVerdict { inside: true, witness: None }),
        Err(Error::Domain(w)) => Ok(DomainVerdict { inside: false, witness: Some(w) }),
        Err(e) => Err(e),
    }
}

/// Membership of `(v, s)` in the extended domain `SJ^(s) U`.
pub fn domain_check(f: &MapExpr, v: &VecTuple, s: &ScalarTuple) -> Result<DomainVerdict> {
    verdict(sj_via_ring(f, v, s))
}

/// Membership of `x` in the domain of `T^(t) f`.
pub fn domain_check_cubic(f: &MapExpr, arg: &CubicArg) -> Result<DomainVerdict> {
    verdict(t_via_ring(f, arg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cubic::t_extension;
    use crate::ring::{rational, RingDescriptor};
    use crate::simplicial::sj_extension;

    fn q(v: &[i64]) -> Vec<RingElement> {
        v.iter().map(|&x| rational(x, 1)).collect()
    }

    fn map(src: &str) -> MapExpr {
        MapExpr::parse(src).unwrap()
    }

    fn arg(x: &[i64], t: &[i64]) -> CubicArg {
        let mut ts = q(&[0]);
        ts.extend(q(t));
        CubicArg::new(q(x).into_iter().map(|e| vec![e]).collect(), ts).unwrap()
    }

    #[test]
    fn simplicial_jets() {
        let sq = map("f(x) = x^2");
        let v = VecTuple::scalars(q(&[2, 1, 0])).unwrap();
        let jet = sj_via_ring(&sq, &v, &ScalarTuple::new(q(&[0, 1, 3])).unwrap()).unwrap();
        assert_eq!(jet, VecTuple::scalars(q(&[4, 5, 1])).unwrap());
        // (v0², 2 v0 v1, v1² + 2 v0 v2)
        let v = VecTuple::scalars(q(&[3, 5, 7])).unwrap();
        let jet = sj_via_ring(&sq, &v, &ScalarTuple::zeros(&RingDescriptor::Rational, 2)).unwrap();
        assert_eq!(jet, VecTuple::scalars(q(&[9, 30, 25 + 42])).unwrap());
        let z2 = RingDescriptor::zmod(2).unwrap();
        let v = VecTuple::scalars(vec![z2.one(); 3]).unwrap();
        let jet = sj_via_ring(&map("f(x) = x^3"), &v, &ScalarTuple::zeros(&z2, 2)).unwrap();
        assert_eq!(jet, VecTuple::scalars(vec![z2.one(), z2.one(), z2.zero()]).unwrap());
    }

    #[test]
    fn ring_path_matches_finite_differences() {
        let f = map("f(x, y) = x^2*y - 3/(1 + x^2), y^3");
        let v = VecTuple::new(vec![q(&[1, 2]), q(&[-1, 3]), q(&[2, 0]), q(&[1, 1])]).unwrap();
        let s = ScalarTuple::new(q(&[2, 3, 5, -1])).unwrap();
        assert_eq!(sj_via_ring(&f, &v, &s).unwrap(), sj_extension(&f, &v, &s).unwrap());
    }

    #[test]
    fn cubic_jets() {
        let sq = map("f(x) = x^2");
        assert_eq!(t_via_ring(&sq, &arg(&[3, 1], &[0])).unwrap(), vec![q(&[9]), q(&[6])]);
        assert_eq!(t_via_ring(&sq, &arg(&[1, 2], &[3])).unwrap(), vec![q(&[1]), q(&[16])]);
        let id = map("f(x) = x");
        let a = arg(&[1, 2, 3, 4, 5, 6, 7, 8], &[0, 3, 1, 0, 1, 2, 7]);
        assert_eq!(t_via_ring(&id, &a).unwrap(), a.vectors().to_vec());
    }

    #[test]
    fn cubic_ring_path_matches_finite_differences() {
        let f = map("f(x) = x^4 - 2*x/(3 + x^2)");
        let a = arg(&[2, 1, 0, 0], &[1, 2, 1]);
        assert_eq!(t_via_ring(&f, &a).unwrap(), t_extension(&f, &a).unwrap());
        let a = arg(&[1, 2, -1, 3, 0, 5, 2, -2], &[2, 3, 1, 5, -1, 2, 7]);
        assert_eq!(t_via_ring(&f, &a).unwrap(), t_extension(&f, &a).unwrap());
        let g = map("g(x, y) = x*y^2 - y, 1/(2 + x^2*y^2)");
        let vectors = (0..16).map(|i| q(&[i % 5 - 2, i % 3 - 1])).collect();
        let mut ts = q(&[0]);
        ts.extend((1..16).map(|i| rational(i % 7 + 1, (i % 3) + 1)));
        let a = CubicArg::new(vectors, ts).unwrap();
        assert_eq!(t_via_ring(&g, &a).unwrap(), t_extension(&g, &a).unwrap());
    }

    #[test]
    fn taylor() {
        let cube = map("f(x) = x^3");
        let c = taylor_coeffs(&cube, &q(&[2]), &q(&[1]), 3).unwrap();
        assert_eq!(c, vec![q(&[8]), q(&[12]), q(&[6]), q(&[1])]);
        let c = taylor_coeffs(&map("f(x) = x^2"), &q(&[0]), &q(&[1]), 3).unwrap();
        assert_eq!(c, vec![q(&[0]), q(&[0]), q(&[1]), q(&[0])]);
        let z3 = RingDescriptor::zmod(3).unwrap();
        let c = taylor_coeffs(&cube, &[z3.one()], &[z3.one()], 3).unwrap();
        let e = |n| vec![z3.embed_int(n)];
        assert_eq!(c, vec![e(1), e(0), e(0), e(1)]);
    }

    #[test]
    fn domain_checks() {
        let inv = map("f(x) = 1/x");
        let zeros = ScalarTuple::zeros(&RingDescriptor::Rational, 1);
        let d = domain_check(&inv, &VecTuple::scalars(q(&[0, 1])).unwrap(), &zeros).unwrap();
        assert!(!d.inside);
        assert_eq!(d.witness.unwrap().subexpr, "x");
        let d = domain_check(&inv, &VecTuple::scalars(q(&[1, 17])).unwrap(), &zeros).unwrap();
        assert!(d.inside);
        let poly = map("f(x) = x^7 - x");
        assert!(domain_check(&poly, &VecTuple::scalars(q(&[0, 0])).unwrap(), &zeros).unwrap().inside);
        // v0 inside, second evaluation point 1 + (1 - 0)(-1) = 0 outside
        let s = ScalarTuple::new(q(&[0, 1])).unwrap();
        assert!(!domain_check(&inv, &VecTuple::scalars(q(&[1, -1])).unwrap(), &s).unwrap().inside);
        let a = arg(&[0, 1, 1, 1], &[0, 0, 1]);
        assert!(!domain_check_cubic(&inv, &a).unwrap().inside);
        let a = arg(&[2, 1, 1, 1], &[0, 0, 1]);
        assert!(domain_check_cubic(&inv, &a).unwrap().inside);
    }
}
