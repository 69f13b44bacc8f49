use crate::error::{Error, Result};
use crate::ring::RingElement;

/// Square lower-triangular matrix over a base ring.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularMatrix {
    entries: Vec<Vec<RingElement>>,
}

impl TriangularMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<RingElement>] {
        &self.entries
    }

    pub fn mul(&self, other: &TriangularMatrix) -> Result<TriangularMatrix> {
        let n = self.dim();
        if other.dim() != n {
            return Err(Error::LengthMismatch(format!("matrix sizes {n} and {}", other.dim())));
        }
        let zero = self.entries[0][0].owner().zero();
        let mut out = vec![vec![zero.clone(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let mut acc = zero.clone();
                for m in j..=i {
                    acc = acc.add(&self.entries[i][m].mul(&other.entries[m][j])?)?;
                }
                out[i][j] = acc;
            }
        }
        Ok(TriangularMatrix { entries: out })
    }

    pub fn is_identity(&self) -> Result<bool> {
        let owner = self.entries[0][0].owner();
        let (zero, one) = (owner.zero(), owner.one());
        for (i, row) in self.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if !e.ring_eq(if i == j { &one } else { &zero })? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Applies the matrix to a tuple of points: `(M v)_i = Σ_j M_ij v_j`.
    pub fn apply(&self, v: &[Vec<RingElement>]) -> Result<Vec<Vec<RingElement>>> {
        if v.len() != self.dim() {
            return Err(Error::LengthMismatch(format!("matrix of size {} applied to {} slots", self.dim(), v.len())));
        }
        let width = v[0].len();
        let zero = self.entries[0][0].owner().zero();
        let mut out = Vec::with_capacity(v.len());
        for i in 0..self.dim() {
            let mut row = vec![zero.clone(); width];
            for (j, vj) in v.iter().enumerate().take(i + 1) {
                let m = &self.entries[i][j];
                for (c, x) in row.iter_mut().zip(vj) {
                    *c = c.add(&m.mul(x)?)?;
                }
            }
            out.push(row);
        }
        Ok(out)
    }
}

fn check_tuple(s: &[RingElement]) -> Result<()> {
    let Some(first) = s.first() else {
        return Err(Error::LengthMismatch("empty scalar tuple".into()));
    };
    let owner = first.owner();
    for x in s {
        if x.owner() != owner {
            return Err(Error::OwnerMismatch { left: owner.to_string(), right: x.owner().to_string() });
        }
    }
    Ok(())
}

/// `M_s` with entries `M_ij = ∏_{l<j} (s_i - s_l)` for `j <= i`.
pub fn m_matrix(s: &[RingElement]) -> Result<TriangularMatrix> {
    check_tuple(s)?;
    let owner = s[0].owner();
    let n = s.len();
    let mut entries = vec![vec![owner.zero(); n]; n];
    for i in 0..n {
        let mut prod = owner.one();
        for j in 0..=i {
            entries[i][j] = prod.clone();
            prod = prod.mul(&s[i].sub(&s[j])?)?;
        }
    }
    Ok(TriangularMatrix { entries })
}

/// `N_s = M_s^{-1}` with entries `N_ij = 1 / ∏_{m <= i, m != j} (s_j - s_m)`.
pub fn n_matrix(s: &[RingElement]) -> Result<TriangularMatrix> {
    check_tuple(s)?;
    let owner = s[0].owner();
    let n = s.len();
    let mut entries = vec![vec![owner.zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut prod = owner.one();
            for m in 0..=i {
                if m != j {
                    prod = prod.mul(&s[j].sub(&s[m])?)?;
                }
            }
            entries[i][j] = prod.try_invert().ok_or_else(|| {
                Error::NonsingularRequired(format!("a difference of s_{j} and another entry is not invertible"))
            })?;
        }
    }
    Ok(TriangularMatrix { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rational;

    fn qs(v: &[i64]) -> Vec<RingElement> {
        v.iter().map(|&x| rational(x, 1)).collect()
    }

    #[test]
    fn m_matrix_examples() {
        let m = m_matrix(&qs(&[0, 3])).unwrap();
        assert_eq!(m.rows(), &[qs(&[1, 0]), qs(&[1, 3])]);
        let m = m_matrix(&qs(&[0, 1, 3])).unwrap();
        assert_eq!(m.rows(), &[qs(&[1, 0, 0]), qs(&[1, 1, 0]), qs(&[1, 3, 6])]);
    }

    #[test]
    fn n_inverts_m() {
        let s = qs(&[2, -1, 5, 7]);
        let m = m_matrix(&s).unwrap();
        let n = n_matrix(&s).unwrap();
        assert!(m.mul(&n).unwrap().is_identity().unwrap());
        assert!(n.mul(&m).unwrap().is_identity().unwrap());
        assert_eq!(n.entry(1, 0), &rational(1, 3));
        assert_eq!(n.entry(1, 1), &rational(-1, 3));
    }

    #[test]
    fn n_matrix_needs_nonsingular() {
        let err = n_matrix(&qs(&[0, 0, 1])).unwrap_err();
        assert_eq!(err.kind(), "NonsingularRequired");
        // m_matrix has no precondition
        assert!(m_matrix(&qs(&[0, 0, 1])).is_ok());
    }
}
