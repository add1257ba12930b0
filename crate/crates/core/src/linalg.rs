//! Small dense determinants and Newton divided differences over [`Scalar`].

use crate::scalar::Scalar;

/// Determinant of a square row-major matrix by Gaussian elimination.
///
/// Pivots are chosen by largest magnitude among the nonzero candidates, so
/// the same routine serves floats (partial pivoting) and exact rationals.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let n = m.len();
    debug_assert!(m.iter().all(|row| row.len() == n));
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !m[r][col].is_zero())
            .max_by(|&a, &b| m[a][col].magnitude().total_cmp(&m[b][col].magnitude()));
        let Some(pivot) = pivot else {
            return S::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let head = m[col][col].clone();
        det = det * head.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / head.clone();
            for c in col + 1..n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Leading divided differences `f[x_0], f[x_0,x_1], ..., f[x_0..x_{k-1}]`.
///
/// `nodes` must be sorted so that equal nodes are adjacent. For a run of `m+1`
/// equal nodes the table uses `f^{(m)}(x)/m!`, supplied by `taylor(x, m)`.
pub fn leading_divided_differences<S, F, E>(nodes: &[S], mut taylor: F) -> Result<Vec<S>, E>
where
    S: Scalar,
    F: FnMut(&S, u32) -> Result<S, E>,
{
    let k = nodes.len();
    // table[i] holds f[x_i .. x_{i+level}] for the current level.
    let mut table: Vec<S> = nodes.iter().map(|x| taylor(x, 0)).collect::<Result<_, _>>()?;
    let mut out = Vec::with_capacity(k);
    if k == 0 {
        return Ok(out);
    }
    out.push(table[0].clone());
    for level in 1..k {
        let mut next = Vec::with_capacity(k - level);
        for i in 0..k - level {
            let (lo, hi) = (&nodes[i], &nodes[i + level]);
            let v = if lo == hi {
                taylor(lo, level as u32)?
            } else {
                (table[i + 1].clone() - table[i].clone()) / (hi.clone() - lo.clone())
            };
            next.push(v);
        }
        out.push(next[0].clone());
        table = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        assert_eq!(determinant(m), q(5, 1));
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(determinant(m), -1.0);
        let m = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(determinant(m), 0.0);
    }

    #[test]
    fn vandermonde_rows_in_decreasing_powers() {
        // det(x_k^{q-j}) = prod_{j<k} (x_j - x_k)
        let xs = [q(1, 2), q(-1, 3), q(2, 1), q(5, 7)];
        let n = xs.len();
        let m: Vec<Vec<BigRational>> = (0..n)
            .map(|j| xs.iter().map(|x| x.powi((n - 1 - j) as u32)).collect())
            .collect();
        let mut prod = q(1, 1);
        for j in 0..n {
            for k in j + 1..n {
                prod *= xs[j].clone() - xs[k].clone();
            }
        }
        assert_eq!(determinant(m), prod);
    }

    #[test]
    fn divided_differences_of_cubic() {
        // f = x^3: f[a,b] = a^2+ab+b^2, f[a,a,a] = 3a, f[a,a,a,a] = 1
        let taylor = |x: &BigRational, m: u32| -> Result<BigRational, ()> {
            Ok(match m {
                0 => x.powi(3),
                1 => q(3, 1) * x.powi(2),
                2 => q(3, 1) * x.clone(),
                3 => q(1, 1),
                _ => q(0, 1),
            })
        };
        let a = q(1, 2);
        let dd = leading_divided_differences(&[a.clone(), a.clone(), a.clone(), a.clone()], taylor).unwrap();
        assert_eq!(dd, vec![a.powi(3), q(3, 1) * a.powi(2), q(3, 1) * a.clone(), q(1, 1)]);
        let b = q(2, 1);
        let dd = leading_divided_differences(&[a.clone(), b.clone()], taylor).unwrap();
        assert_eq!(dd[1], a.powi(2) + a.clone() * b.clone() + b.powi(2));
    }
}
