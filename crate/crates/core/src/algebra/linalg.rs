//! Dense linear algebra over a runtime ring, used for inversion in the
//! finite-dimensional quotient algebras.

use crate::error::Result;
use crate::ring::{RingDescriptor, RingElement};

pub(crate) type Matrix = Vec<Vec<RingElement>>;

/// Solves `m * x = rhs` by Gaussian elimination with unit pivots.
///
/// Returns `Ok(None)` if some column has no invertible pivot left. Over a
/// field (and over local rings) this means `m` is singular; over other rings
/// the caller must fall back to [`inverse_by_charpoly`].
pub(crate) fn solve(mut m: Matrix, mut rhs: Vec<RingElement>) -> Result<Option<Vec<RingElement>>> {
    let n = rhs.len();
    for col in 0..n {
        let mut best: Option<(usize, RingElement, f64)> = None;
        for row in col..n {
            if let Some(inv) = m[row][col].try_invert() {
                let w = m[row][col].pivot_weight();
                if best.as_ref().is_none_or(|(_, _, bw)| w > *bw) {
                    best = Some((row, inv, w));
                }
                if w == 0.0 {
                    break;
                }
            }
        }
        let Some((pivot, inv, _)) = best else {
            return Ok(None);
        };
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for j in col..n {
            m[col][j] = m[col][j].mul(&inv)?;
        }
        rhs[col] = rhs[col].mul(&inv)?;
        for row in 0..n {
            if row == col || m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone();
            for j in col..n {
                let d = factor.mul(&m[col][j])?;
                m[row][j] = m[row][j].sub(&d)?;
            }
            let d = factor.mul(&rhs[col])?;
            rhs[row] = rhs[row].sub(&d)?;
        }
    }
    Ok(Some(rhs))
}

/// Characteristic polynomial `det(λI - m)` by Berkowitz's division-free
/// algorithm. Coefficients are returned highest degree first, leading `1`.
pub(crate) fn charpoly(base: &RingDescriptor, m: &Matrix) -> Result<Vec<RingElement>> {
    let n = m.len();
    let mut p = vec![base.one()];
    for k in 0..n {
        // column of the Toeplitz factor: 1, -a_kk, -R C, -R A C, ..., -R A^{k-1} C
        let mut q = Vec::with_capacity(k + 2);
        q.push(base.one());
        q.push(m[k][k].neg());
        let mut c: Vec<RingElement> = (0..k).map(|i| m[i][k].clone()).collect();
        for _ in 0..k {
            let mut rc = base.zero();
            for (j, cj) in c.iter().enumerate() {
                rc = rc.add(&m[k][j].mul(cj)?)?;
            }
            q.push(rc.neg());
            let mut next = Vec::with_capacity(k);
            for i in 0..k {
                let mut acc = base.zero();
                for (j, cj) in c.iter().enumerate() {
                    acc = acc.add(&m[i][j].mul(cj)?)?;
                }
                next.push(acc);
            }
            c = next;
        }
        let mut np = Vec::with_capacity(k + 2);
        for i in 0..k + 2 {
            let mut acc = base.zero();
            for (j, pj) in p.iter().enumerate() {
                if i >= j {
                    acc = acc.add(&q[i - j].mul(pj)?)?;
                }
            }
            np.push(acc);
        }
        p = np;
    }
    Ok(p)
}

/// Inverse of an algebra element via Cayley-Hamilton on its multiplication
/// operator. `mul` multiplies coordinate vectors, `one` is the unit's coordinates.
pub(crate) fn inverse_by_charpoly<F>(
    base: &RingDescriptor,
    op: &Matrix,
    z: &[RingElement],
    one: &[RingElement],
    mul: F,
) -> Result<Option<Vec<RingElement>>>
where
    F: Fn(&[RingElement], &[RingElement]) -> Result<Vec<RingElement>>,
{
    let p = charpoly(base, op)?;
    let n = op.len();
    let Some(c0_inv) = p[n].try_invert() else {
        return Ok(None);
    };
    // Horner: z^{n-1} + p1 z^{n-2} + ... + p_{n-1}
    let mut acc = one.to_vec();
    for coeff in &p[1..n] {
        acc = mul(&acc, z)?;
        acc[0] = acc[0].add(coeff)?;
        // constants live in coordinate 0 of both algebra bases
    }
    let scale = c0_inv.neg();
    Ok(Some(acc.iter().map(|a| a.mul(&scale)).collect::<Result<_>>()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rational;

    #[test]
    fn charpoly_of_small_matrices() {
        let q = RingDescriptor::Rational;
        let m = vec![vec![rational(2, 1), rational(1, 1)], vec![rational(3, 1), rational(4, 1)]];
        // λ² - 6λ + 5
        let p = charpoly(&q, &m).unwrap();
        assert_eq!(p, vec![rational(1, 1), rational(-6, 1), rational(5, 1)]);
        let m3 = vec![
            vec![rational(1, 1), rational(2, 1), rational(0, 1)],
            vec![rational(0, 1), rational(1, 1), rational(5, 1)],
            vec![rational(7, 1), rational(0, 1), rational(2, 1)],
        ];
        // det(λI - m) = λ³ - 4λ² + 5λ - 72 (det m = 2 + 70 = 72)
        let p = charpoly(&q, &m3).unwrap();
        assert_eq!(p, vec![rational(1, 1), rational(-4, 1), rational(5, 1), rational(-72, 1)]);
    }

    #[test]
    fn solve_rational_system() {
        let m = vec![vec![rational(0, 1), rational(1, 1)], vec![rational(2, 1), rational(1, 1)]];
        let x = solve(m, vec![rational(3, 1), rational(5, 1)]).unwrap().unwrap();
        assert_eq!(x, vec![rational(1, 1), rational(3, 1)]);
        let singular = vec![vec![rational(1, 1), rational(2, 1)], vec![rational(2, 1), rational(4, 1)]];
        assert!(solve(singular, vec![rational(1, 1), rational(0, 1)]).unwrap().is_none());
    }
}
