//! Scalar rings.
//!
//! A [`RingDescriptor`] names a commutative ring at runtime; a [`RingElement`]
//! is a value in canonical form that knows its owner. Arithmetic between
//! elements of different owners fails with [`Error::OwnerMismatch`]; there is
//! no implicit coercion. The quotient variants wrap the truncated polynomial
//! rings and cubic algebras of [`crate::algebra`], so every piece of machinery
//! that evaluates over a ring also evaluates over its scalar extensions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{CubicAlgebra, CubicElement, TruncatedPolyElement, TruncatedPolyRing};
use crate::error::{Error, Result};

/// Comparison tolerance of an approximate-real ring. Always positive and finite.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance(f64);

impl Tolerance {
    pub fn new(tol: f64) -> Result<Self> {
        if tol.is_finite() && tol > 0.0 {
            Ok(Tolerance(tol))
        } else {
            Err(Error::InvalidDescriptor(format!("tolerance must be positive, got {tol}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for Tolerance {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for Tolerance {}

#[derive(Debug, Clone)]
pub enum RingDescriptor {
    Rational,
    ZMod(u64),
    Real(Tolerance),
    Simplicial(Arc<TruncatedPolyRing>),
    Cubic(Arc<CubicAlgebra>),
}

impl PartialEq for RingDescriptor {
    fn eq(&self, other: &Self) -> bool {
        use RingDescriptor::*;
        match (self, other) {
            (Rational, Rational) => true,
            (ZMod(a), ZMod(b)) => a == b,
            (Real(a), Real(b)) => a == b,
            (Simplicial(a), Simplicial(b)) => Arc::ptr_eq(a, b) || **a == **b,
            (Cubic(a), Cubic(b)) => Arc::ptr_eq(a, b) || **a == **b,
            _ => false,
        }
    }
}

impl Eq for RingDescriptor {}

impl RingDescriptor {
    pub fn zmod(modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::InvalidDescriptor(format!("modulus must be >= 2, got {modulus}")));
        }
        Ok(RingDescriptor::ZMod(modulus))
    }

    pub fn real(tolerance: f64) -> Result<Self> {
        Ok(RingDescriptor::Real(Tolerance::new(tolerance)?))
    }

    /// True for rings whose equality is exact (everything but approximate reals,
    /// including quotients over exact bases).
    pub fn is_exact(&self) -> bool {
        match self {
            RingDescriptor::Rational | RingDescriptor::ZMod(_) => true,
            RingDescriptor::Real(_) => false,
            RingDescriptor::Simplicial(r) => r.base().is_exact(),
            RingDescriptor::Cubic(a) => a.base().is_exact(),
        }
    }

    /// True when every non-zero element is a unit.
    pub fn is_field(&self) -> bool {
        match self {
            RingDescriptor::Rational | RingDescriptor::Real(_) => true,
            RingDescriptor::ZMod(m) => is_prime(*m),
            RingDescriptor::Simplicial(_) | RingDescriptor::Cubic(_) => false,
        }
    }

    pub fn zero(&self) -> RingElement {
        self.embed_int(0)
    }

    pub fn one(&self) -> RingElement {
        self.embed_int(1)
    }

    /// Canonical image of an integer: the n-fold sum of the unit.
    pub fn embed_int(&self, n: i64) -> RingElement {
        self.embed_bigint(&BigInt::from(n))
    }

    pub fn embed_bigint(&self, n: &BigInt) -> RingElement {
        match self {
            RingDescriptor::Rational => RingElement::Rational(BigRational::from_integer(n.clone())),
            RingDescriptor::ZMod(m) => {
                let r = n.mod_floor(&BigInt::from(*m));
                RingElement::Residue { value: r.to_u64().expect("residue below modulus"), modulus: *m }
            }
            RingDescriptor::Real(tol) => {
                RingElement::Real { value: n.to_f64().unwrap_or(f64::NAN), tol: *tol }
            }
            RingDescriptor::Simplicial(ring) => RingElement::Simplicial(ring.constant(ring.base().embed_bigint(n))),
            RingDescriptor::Cubic(alg) => RingElement::Cubic(alg.constant(alg.base().embed_bigint(n))),
        }
    }

    /// Parses a scalar of a base ring from its textual form (`"3/4"`, `"-2"`, `"1e-3"`).
    pub fn parse_element(&self, text: &str) -> Result<RingElement> {
        let t = text.trim();
        let bad = || Error::InvalidElement { text: text.to_string(), ring: self.to_string() };
        match self {
            RingDescriptor::Rational => {
                let q = BigRational::from_str(t).map_err(|_| bad())?;
                Ok(RingElement::Rational(q))
            }
            RingDescriptor::ZMod(_) => {
                let n = BigInt::from_str(t).map_err(|_| bad())?;
                Ok(self.embed_bigint(&n))
            }
            RingDescriptor::Real(tol) => {
                let v = f64::from_str(t).map_err(|_| bad())?;
                if !v.is_finite() {
                    return Err(bad());
                }
                Ok(RingElement::Real { value: v, tol: *tol })
            }
            RingDescriptor::Simplicial(_) | RingDescriptor::Cubic(_) => Err(bad()),
        }
    }

    /// JSON form of the descriptor. Base rings are strings, quotients objects.
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            RingDescriptor::Simplicial(r) => r.to_json(),
            RingDescriptor::Cubic(a) => a.to_json(),
            _ => serde_json::Value::String(self.to_string()),
        }
    }
}

impl fmt::Display for RingDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingDescriptor::Rational => write!(f, "rational"),
            RingDescriptor::ZMod(m) => write!(f, "zmod:{m}"),
            RingDescriptor::Real(t) => write!(f, "real:{:e}", t.0),
            RingDescriptor::Simplicial(_) | RingDescriptor::Cubic(_) => write!(f, "{}", self.to_json()),
        }
    }
}

impl FromStr for RingDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "rational" {
            return Ok(RingDescriptor::Rational);
        }
        if let Some(m) = s.strip_prefix("zmod:") {
            let m = m.trim().parse::<u64>().map_err(|_| Error::InvalidDescriptor(s.to_string()))?;
            return RingDescriptor::zmod(m);
        }
        if let Some(t) = s.strip_prefix("real:") {
            let t = t.trim().parse::<f64>().map_err(|_| Error::InvalidDescriptor(s.to_string()))?;
            return RingDescriptor::real(t);
        }
        Err(Error::InvalidDescriptor(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RingElement {
    Rational(BigRational),
    Residue { value: u64, modulus: u64 },
    Real { value: f64, tol: Tolerance },
    Simplicial(TruncatedPolyElement),
    Cubic(CubicElement),
}

impl RingElement {
    pub fn owner(&self) -> RingDescriptor {
        match self {
            RingElement::Rational(_) => RingDescriptor::Rational,
            RingElement::Residue { modulus, .. } => RingDescriptor::ZMod(*modulus),
            RingElement::Real { tol, .. } => RingDescriptor::Real(*tol),
            RingElement::Simplicial(e) => RingDescriptor::Simplicial(e.ring().clone()),
            RingElement::Cubic(e) => RingDescriptor::Cubic(e.algebra().clone()),
        }
    }

    fn mismatch(&self, other: &RingElement) -> Error {
        Error::OwnerMismatch { left: self.owner().to_string(), right: other.owner().to_string() }
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        use RingElement::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Ok(Rational(a + b)),
            (Residue { value: a, modulus: m }, Residue { value: b, modulus: n }) if m == n => {
                Ok(Residue { value: ((*a as u128 + *b as u128) % *m as u128) as u64, modulus: *m })
            }
            (Real { value: a, tol: s }, Real { value: b, tol: t }) if s == t => Ok(Real { value: a + b, tol: *s }),
            (Simplicial(a), Simplicial(b)) => Ok(Simplicial(a.add(b)?)),
            (Cubic(a), Cubic(b)) => Ok(Cubic(a.add(b)?)),
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RingElement {
        use RingElement::*;
        match self {
            Rational(a) => Rational(-a),
            Residue { value, modulus } => Residue { value: (*modulus - *value) % *modulus, modulus: *modulus },
            Real { value, tol } => Real { value: -value, tol: *tol },
            Simplicial(a) => Simplicial(a.neg()),
            Cubic(a) => Cubic(a.neg()),
        }
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        use RingElement::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Ok(Rational(a * b)),
            (Residue { value: a, modulus: m }, Residue { value: b, modulus: n }) if m == n => {
                Ok(Residue { value: ((*a as u128 * *b as u128) % *m as u128) as u64, modulus: *m })
            }
            (Real { value: a, tol: s }, Real { value: b, tol: t }) if s == t => Ok(Real { value: a * b, tol: *s }),
            (Simplicial(a), Simplicial(b)) => Ok(Simplicial(a.mul(b)?)),
            (Cubic(a), Cubic(b)) => Ok(Cubic(a.mul(b)?)),
            _ => Err(self.mismatch(other)),
        }
    }

    /// Multiplicative inverse, or `None` when the element is not a unit.
    /// Approximate reals within tolerance of zero count as non-units.
    pub fn try_invert(&self) -> Option<RingElement> {
        use RingElement::*;
        match self {
            Rational(a) => (!a.is_zero()).then(|| Rational(a.recip())),
            Residue { value, modulus } => {
                mod_inverse(*value, *modulus).map(|v| Residue { value: v, modulus: *modulus })
            }
            Real { value, tol } => (value.abs() > tol.0).then(|| Real { value: 1.0 / value, tol: *tol }),
            Simplicial(a) => a.try_invert().map(Simplicial),
            Cubic(a) => a.try_invert().map(Cubic),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.try_invert().is_some()
    }

    /// `self / other`, failing with `NotInvertible` when `other` is not a unit.
    pub fn div(&self, other: &RingElement) -> Result<RingElement> {
        let inv = other.try_invert().ok_or(Error::NotInvertible)?;
        self.mul(&inv)
    }

    pub fn pow(&self, mut exp: u64) -> Result<RingElement> {
        let mut acc = self.owner().one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Ring equality: exact for exact kinds, relative-plus-absolute tolerance for reals.
    pub fn ring_eq(&self, other: &RingElement) -> Result<bool> {
        use RingElement::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Ok(a == b),
            (Residue { value: a, modulus: m }, Residue { value: b, modulus: n }) if m == n => Ok(a == b),
            (Real { value: a, tol: s }, Real { value: b, tol: t }) if s == t => {
                let scale = 1f64.max(a.abs()).max(b.abs());
                Ok((a - b).abs() <= s.0 * scale)
            }
            (Simplicial(a), Simplicial(b)) => {
                if a.ring() != b.ring() {
                    return Err(self.mismatch(other));
                }
                all_eq(a.coeffs(), b.coeffs())
            }
            (Cubic(a), Cubic(b)) => {
                if a.algebra() != b.algebra() {
                    return Err(self.mismatch(other));
                }
                all_eq(a.coeffs(), b.coeffs())
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.ring_eq(&self.owner().zero()).unwrap_or(false)
    }

    /// Magnitude used to choose pivots in elimination; zero for exact kinds.
    pub(crate) fn pivot_weight(&self) -> f64 {
        match self {
            RingElement::Real { value, .. } => value.abs(),
            _ => 0.0,
        }
    }

    /// Coordinates over the base ring for quotient elements; `None` for base scalars.
    pub fn coordinates(&self) -> Option<&[RingElement]> {
        match self {
            RingElement::Simplicial(e) => Some(e.coeffs()),
            RingElement::Cubic(e) => Some(e.coeffs()),
            _ => None,
        }
    }

    /// JSON form: strings for scalars, arrays of coordinates for quotient elements.
    pub fn to_json(&self) -> serde_json::Value {
        match self.coordinates() {
            Some(cs) => serde_json::Value::Array(cs.iter().map(RingElement::to_json).collect()),
            None => serde_json::Value::String(self.to_string()),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            RingElement::Rational(q) => Some(q),
            _ => None,
        }
    }
}

fn all_eq(a: &[RingElement], b: &[RingElement]) -> Result<bool> {
    for (x, y) in a.iter().zip(b) {
        if !x.ring_eq(y)? {
            return Ok(false);
        }
    }
    Ok(a.len() == b.len())
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingElement::Rational(q) => {
                if q.denom().is_one() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            RingElement::Residue { value, .. } => write!(f, "{value}"),
            RingElement::Real { value, .. } => write!(f, "{value}"),
            RingElement::Simplicial(_) | RingElement::Cubic(_) => write!(f, "{}", self.to_json()),
        }
    }
}

/// Lexicographic coefficient-wise ring equality of two equally long slices.
pub fn slices_eq(a: &[RingElement], b: &[RingElement]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    all_eq(a, b)
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact rational from an integer pair; used by tests and generators.
pub fn rational(num: i64, den: i64) -> RingElement {
    RingElement::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(m: u64, n: i64) -> RingElement {
        RingDescriptor::zmod(m).unwrap().embed_int(n)
    }

    #[test]
    fn residue_arithmetic() {
        assert_eq!(z(7, 5).add(&z(7, 4)).unwrap(), z(7, 2));
        assert!(!z(5, 2).ring_eq(&z(5, 3)).unwrap());
        assert_eq!(z(7, 0).sub(&z(7, 1)).unwrap(), z(7, 6));
    }

    #[test]
    fn rational_arithmetic() {
        let q = RingDescriptor::Rational;
        let a = rational(3, 7);
        assert_eq!(a.add(&q.zero()).unwrap(), a);
        assert_eq!(rational(1, 2).mul(&rational(2, 3)).unwrap(), rational(1, 3));
        assert!(rational(2, 4).ring_eq(&rational(1, 2)).unwrap());
        assert_eq!(rational(6, -4).to_string(), "-3/2");
    }

    #[test]
    fn embed_int_reduces() {
        assert_eq!(z(5, 7), RingElement::Residue { value: 2, modulus: 5 });
        assert_eq!(z(2, 6), RingElement::Residue { value: 0, modulus: 2 });
        assert_eq!(z(5, -1), RingElement::Residue { value: 4, modulus: 5 });
        assert!(RingDescriptor::Rational.embed_int(0).is_zero());
    }

    #[test]
    fn inversion_matches_brute_force() {
        for m in 2..=12u64 {
            for a in 0..m {
                let brute = (0..m).find(|b| (a * b) % m == 1 % m && m > 1);
                let got = z(m, a as i64).try_invert().map(|e| match e {
                    RingElement::Residue { value, .. } => value,
                    _ => unreachable!(),
                });
                assert_eq!(got, brute, "inverse of {a} mod {m}");
            }
        }
        assert_eq!(z(7, 3).try_invert(), Some(z(7, 5)));
        assert_eq!(z(6, 4).try_invert(), None);
        assert_eq!(RingDescriptor::Rational.zero().try_invert(), None);
    }

    #[test]
    fn real_tolerance() {
        let r = RingDescriptor::real(1e-9).unwrap();
        let a = r.parse_element("1.0").unwrap();
        let b = r.parse_element("1.000000000001").unwrap();
        assert!(a.ring_eq(&b).unwrap());
        let c = r.parse_element("1.001").unwrap();
        assert!(!a.ring_eq(&c).unwrap());
        assert!(r.parse_element("1e-12").unwrap().try_invert().is_none());
    }

    #[test]
    fn owner_mismatch_is_an_error() {
        let err = z(5, 1).add(&z(7, 1)).unwrap_err();
        assert_eq!(err.kind(), "OwnerMismatch");
        assert!(rational(1, 2).mul(&z(5, 1)).is_err());
        assert!(rational(1, 2).ring_eq(&z(5, 1)).is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        for s in ["rational", "zmod:7", "zmod:2"] {
            assert_eq!(s.parse::<RingDescriptor>().unwrap().to_string(), s);
        }
        assert!("zmod:1".parse::<RingDescriptor>().is_err());
        assert!("real:0".parse::<RingDescriptor>().is_err());
        assert!("real:-1".parse::<RingDescriptor>().is_err());
        assert!("integers".parse::<RingDescriptor>().is_err());
        let r: RingDescriptor = "real:1e-9".parse().unwrap();
        assert_eq!(r, RingDescriptor::real(1e-9).unwrap());
        assert_ne!(r, RingDescriptor::real(1e-8).unwrap());
    }

    #[test]
    fn pow_by_squaring() {
        assert_eq!(z(5, 3).pow(3).unwrap(), z(5, 2));
        assert_eq!(rational(2, 3).pow(0).unwrap(), rational(1, 1));
        assert_eq!(rational(-1, 2).pow(5).unwrap(), rational(-1, 32));
    }
}
