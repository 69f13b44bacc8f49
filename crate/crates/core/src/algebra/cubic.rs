use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::linalg;
use crate::error::{Error, Result};
use crate::ring::{RingDescriptor, RingElement};

/// Subsets of `{1, ..., k}` are bit masks: element `i` is bit `i - 1`.
pub type Subset = usize;

/// Formats a subset as `"1,2"` (empty set: `""`).
pub fn subset_label(mask: Subset) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while mask >> i != 0 {
        if mask >> i & 1 == 1 {
            parts.push((i + 1).to_string());
        }
        i += 1;
    }
    parts.join(",")
}

/// Parses `"1,2"` / `"12"` / `""` into a mask.
pub fn parse_subset(label: &str) -> Option<Subset> {
    let mut mask = 0;
    let digits: Vec<char> = label.chars().filter(|c| *c != ',' && !c.is_whitespace()).collect();
    for c in digits {
        let d = c.to_digit(10)? as usize;
        if d == 0 {
            return None;
        }
        mask |= 1 << (d - 1);
    }
    Some(mask)
}

/// Order in which squared variables are rewritten during normal-form reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteOrder {
    HighestFirst,
    LowestFirst,
    Random(u64),
}

/// The algebra `K[X_1..X_k] / (P_1, ..., P_k)` with
/// `P_i = X_i² - Σ_{J ⊆ {1..i-1}} t_{J ∪ {i}} X_J X_i`.
///
/// Basis: the square-free monomials `X_J`, indexed by mask. Structure
/// constants are computed once per algebra and cached.
#[derive(Debug)]
pub struct CubicAlgebra {
    base: RingDescriptor,
    k: usize,
    params: Vec<RingElement>,
    gamma: OnceLock<Vec<RingElement>>,
}

impl PartialEq for CubicAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.k == other.k && self.params == other.params
    }
}

impl CubicAlgebra {
    /// `params[mask]` is `t_mask`; entry 0 is ignored and stored as zero.
    pub fn new(base: RingDescriptor, k: usize, mut params: Vec<RingElement>) -> Result<Arc<Self>> {
        if k == 0 || k > 8 {
            return Err(Error::OrderOutOfRange { order: k, min: 1, max: 8 });
        }
        if params.len() != 1 << k {
            return Err(Error::LengthMismatch(format!("expected {} parameters, got {}", 1usize << k, params.len())));
        }
        for p in &params {
            if p.owner() != base {
                return Err(Error::OwnerMismatch { left: base.to_string(), right: p.owner().to_string() });
            }
        }
        params[0] = base.zero();
        Ok(Arc::new(CubicAlgebra { base, k, params, gamma: OnceLock::new() }))
    }

    /// Builds from `(mask, value)` pairs; unspecified parameters are zero.
    pub fn from_pairs(base: RingDescriptor, k: usize, pairs: &[(Subset, RingElement)]) -> Result<Arc<Self>> {
        let mut params = vec![base.zero(); 1 << k];
        for (mask, v) in pairs {
            if *mask == 0 || *mask >= 1 << k {
                return Err(Error::LengthMismatch(format!("subset {} outside 1..={k}", subset_label(*mask))));
            }
            params[*mask] = v.clone();
        }
        Self::new(base, k, params)
    }

    pub fn base(&self) -> &RingDescriptor {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dimension(&self) -> usize {
        1 << self.k
    }

    pub fn param(&self, mask: Subset) -> &RingElement {
        &self.params[mask]
    }

    pub fn params(&self) -> &[RingElement] {
        &self.params
    }

    pub fn descriptor(self: &Arc<Self>) -> RingDescriptor {
        RingDescriptor::Cubic(self.clone())
    }

    pub fn params_json(&self) -> serde_json::Value {
        let mut t = serde_json::Map::new();
        for mask in 1..self.dimension() {
            t.insert(subset_label(mask), self.params[mask].to_json());
        }
        serde_json::Value::Object(t)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"type": "cubic", "base": self.base.to_json(), "k": self.k, "t": self.params_json()})
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<RingElement>) -> Result<CubicElement> {
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
        Ok(CubicElement { algebra: self.clone(), coeffs })
    }

    pub fn constant(self: &Arc<Self>, c: RingElement) -> CubicElement {
        let mut coeffs = vec![self.base.zero(); self.dimension()];
        coeffs[0] = c;
        CubicElement { algebra: self.clone(), coeffs }
    }

    /// The basis element `X_J`.
    pub fn basis(self: &Arc<Self>, mask: Subset) -> CubicElement {
        let mut coeffs = vec![self.base.zero(); self.dimension()];
        coeffs[mask] = self.base.one();
        CubicElement { algebra: self.clone(), coeffs }
    }

    /// Normal form of the monomial `∏ X_i^{exps[i-1]}` as coefficients over the basis.
    pub fn reduce_monomial(&self, exps: &[u32], order: RewriteOrder) -> Result<Vec<RingElement>> {
        let mut rng = match order {
            RewriteOrder::Random(seed) => Some(<ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed)),
            _ => None,
        };
        let mut out = vec![self.base.zero(); self.dimension()];
        let mut work: Vec<(Vec<u32>, RingElement)> = vec![(exps.to_vec(), self.base.one())];
        while let Some((e, c)) = work.pop() {
            let squared: Vec<usize> = (0..self.k).filter(|&i| e[i] >= 2).collect();
            if squared.is_empty() {
                let mask = e.iter().enumerate().filter(|(_, x)| **x == 1).fold(0, |m, (i, _)| m | 1 << i);
                out[mask] = out[mask].add(&c)?;
                continue;
            }
            let i = match order {
                RewriteOrder::HighestFirst => *squared.last().expect("nonempty"),
                RewriteOrder::LowestFirst => squared[0],
                RewriteOrder::Random(_) => {
                    let rng = rng.as_mut().expect("seeded");
                    squared[rng.gen_range(0..squared.len())]
                }
            };
            // X_i² -> Σ_{J ⊆ {1..i-1}} t_{J ∪ {i}} X_J X_i
            for lower in 0..(1usize << i) {
                let t = &self.params[lower | 1 << i];
                if t.is_zero() {
                    continue;
                }
                let mut next = e.clone();
                next[i] -= 1;
                for (j, x) in next.iter_mut().enumerate().take(i) {
                    if lower >> j & 1 == 1 {
                        *x += 1;
                    }
                }
                work.push((next, c.mul(t)?));
            }
        }
        Ok(out)
    }

    fn product_exponents(&self, a: Subset, b: Subset) -> Vec<u32> {
        (0..self.k).map(|i| (a >> i & 1) as u32 + (b >> i & 1) as u32).collect()
    }

    /// Structure constants with an explicit rewrite order, bypassing the cache.
    pub fn structure_constants_with(&self, order: RewriteOrder) -> Result<Vec<RingElement>> {
        let n = self.dimension();
        let mut table = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                table.extend(self.reduce_monomial(&self.product_exponents(a, b), order)?);
            }
        }
        Ok(table)
    }

    /// Flat table of `Γ^{JK}_L` indexed `[J][K][L]`; see [`CubicAlgebra::gamma`].
    pub fn structure_constants(&self) -> &[RingElement] {
        self.gamma.get_or_init(|| {
            self.structure_constants_with(RewriteOrder::HighestFirst)
                .expect("parameters share the base ring, so reduction cannot mismatch owners")
        })
    }

    /// `Γ^{JK}_L` with `X_J X_K = Σ_L Γ^{JK}_L X_L`.
    pub fn gamma(&self, j: Subset, k: Subset, l: Subset) -> &RingElement {
        let n = self.dimension();
        &self.structure_constants()[(j * n + k) * n + l]
    }

    /// Structure constants computed through the tower `A_k = A_{k-1}[X_k]/(X_k² - t' X_k)`,
    /// independently of the normal-form engine.
    pub fn structure_constants_via_tower(&self) -> Result<Vec<RingElement>> {
        let n = self.dimension();
        let mut table = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                let mut ea = vec![self.base.zero(); n];
                ea[a] = self.base.one();
                let mut eb = vec![self.base.zero(); n];
                eb[b] = self.base.one();
                table.extend(self.tower_mul(self.k, &ea, &eb)?);
            }
        }
        Ok(table)
    }

    /// The element `t' = Σ_{J ∋ level} t_J X_{J \ {level}}` of `A_{level-1}`.
    pub fn tower_parameter(&self, level: usize) -> Vec<RingElement> {
        let half = 1 << (level - 1);
        (0..half).map(|lower| self.params[lower | half].clone()).collect()
    }

    fn tower_mul(&self, level: usize, a: &[RingElement], b: &[RingElement]) -> Result<Vec<RingElement>> {
        if level == 0 {
            return Ok(vec![a[0].mul(&b[0])?]);
        }
        let half = 1 << (level - 1);
        let (a0, a1) = a.split_at(half);
        let (b0, b1) = b.split_at(half);
        let lo = self.tower_mul(level - 1, a0, b0)?;
        let cross1 = self.tower_mul(level - 1, a0, b1)?;
        let cross2 = self.tower_mul(level - 1, a1, b0)?;
        let sq = self.tower_mul(level - 1, a1, b1)?;
        let sq_t = self.tower_mul(level - 1, &sq, &self.tower_parameter(level))?;
        let mut out = lo;
        for i in 0..half {
            out.push(cross1[i].add(&cross2[i])?.add(&sq_t[i])?);
        }
        Ok(out)
    }

    pub(crate) fn mul_coeffs(&self, a: &[RingElement], b: &[RingElement]) -> Result<Vec<RingElement>> {
        let n = self.dimension();
        let gamma = self.structure_constants();
        let mut out = vec![self.base.zero(); n];
        for (j, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x.mul(y)?;
                let row = &gamma[(j * n + k) * n..(j * n + k + 1) * n];
                for (l, g) in row.iter().enumerate() {
                    if !g.is_zero() {
                        out[l] = out[l].add(&xy.mul(g)?)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicElement {
    algebra: Arc<CubicAlgebra>,
    coeffs: Vec<RingElement>,
}

impl CubicElement {
    pub fn algebra(&self) -> &Arc<CubicAlgebra> {
        &self.algebra
    }

    /// Coefficients indexed by subset mask.
    pub fn coeffs(&self) -> &[RingElement] {
        &self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::OwnerMismatch {
                left: self.algebra.to_json().to_string(),
                right: other.algebra.to_json().to_string(),
            })
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(CubicElement { algebra: self.algebra.clone(), coeffs })
    }

    pub fn neg(&self) -> Self {
        CubicElement { algebra: self.algebra.clone(), coeffs: self.coeffs.iter().map(RingElement::neg).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.algebra.mul_coeffs(&self.coeffs, &other.coeffs)?;
        Ok(CubicElement { algebra: self.algebra.clone(), coeffs })
    }

    /// Column `K` is `self * X_K`.
    pub fn multiplication_matrix(&self) -> Result<linalg::Matrix> {
        let n = self.algebra.dimension();
        let base = &self.algebra.base;
        let mut m = vec![vec![base.zero(); n]; n];
        for k in 0..n {
            let col = self.mul(&self.algebra.basis(k))?;
            for (l, c) in col.coeffs.into_iter().enumerate() {
                m[l][k] = c;
            }
        }
        Ok(m)
    }

    pub fn try_invert(&self) -> Option<Self> {
        self.try_invert_inner().ok().flatten()
    }

    fn try_invert_inner(&self) -> Result<Option<Self>> {
        let n = self.algebra.dimension();
        let base = &self.algebra.base;
        let m = self.multiplication_matrix()?;
        let mut one = vec![base.zero(); n];
        one[0] = base.one();
        let sol = match linalg::solve(m.clone(), one.clone())? {
            Some(sol) => Some(sol),
            None if base.is_field() => None,
            None => {
                linalg::inverse_by_charpoly(base, &m, &self.coeffs, &one, |a, b| self.algebra.mul_coeffs(a, b))?
            }
        };
        Ok(sol.map(|coeffs| CubicElement { algebra: self.algebra.clone(), coeffs }))
    }
}
