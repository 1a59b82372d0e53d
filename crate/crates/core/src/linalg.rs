//! Exact linear algebra over integers, rationals and complex rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::types::{rational_to_f64, ExactComplex};

/// Basis of the integer null space of `a` (rows of length `ncols`), each
/// vector primitive (gcd of entries 1) with a positive leading entry.
///
/// Forward elimination is fraction-free (Bareiss); back substitution runs
/// over the rationals and the result is cleared back to integers.
pub fn integer_nullspace(a: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut m: Vec<Vec<BigInt>> = a.to_vec();
    let rows = m.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        for i in r + 1..rows {
            for k in c + 1..ncols {
                let v = (&m[r][c] * &m[i][k] - &m[i][c] * &m[r][k]) / &prev;
                m[i][k] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    let mut basis = Vec::with_capacity(free.len());
    for &f in &free {
        let mut x = vec![BigRational::zero(); ncols];
        x[f] = BigRational::one();
        for i in (0..rank).rev() {
            let pc = pivots[i];
            let mut s = BigRational::zero();
            for k in pc + 1..ncols {
                if !m[i][k].is_zero() && !x[k].is_zero() {
                    s += BigRational::from_integer(m[i][k].clone()) * &x[k];
                }
            }
            x[pc] = -s / BigRational::from_integer(m[i][pc].clone());
        }
        basis.push(primitive(&x));
    }
    basis
}

fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = x.iter().map(|v| (v * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let lead_negative = ints.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative());
    ints.into_iter()
        .map(|v| {
            let v = if g.is_zero() { v } else { v / &g };
            if lead_negative {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Solution of a Hermitian positive-definite system together with a
/// condition estimate (ratio of largest to smallest elimination pivot).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSolve {
    pub solution: Vec<ExactComplex>,
    pub condition_estimate: f64,
}

/// Solves `g x = b` exactly by elimination without pivoting, which is
/// stable for Hermitian positive-definite `g`.
pub fn solve_hermitian(g: &[Vec<ExactComplex>], b: &[ExactComplex]) -> Result<HermitianSolve> {
    let n = b.len();
    if g.len() != n || g.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: g.len() });
    }
    if n == 0 {
        return Ok(HermitianSolve { solution: Vec::new(), condition_estimate: 1.0 });
    }
    let mut a: Vec<Vec<ExactComplex>> = g.to_vec();
    let mut rhs: Vec<ExactComplex> = b.to_vec();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let piv = a[k][k].clone();
        if piv.im != BigRational::zero() || !piv.re.is_positive() {
            return Err(Error::InvalidInput(format!("matrix is not positive definite at pivot {k}")));
        }
        pivots.push(rational_to_f64(&piv.re));
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].clone() / piv.clone();
            let (top, bottom) = a.split_at_mut(i);
            for (x, y) in bottom[0][k..n].iter_mut().zip(&top[k][k..n]) {
                *x = x.clone() - factor.clone() * y.clone();
            }
            let v = rhs[i].clone() - factor * rhs[k].clone();
            rhs[i] = v;
        }
    }
    let mut x = vec![ExactComplex::zero(); n];
    for i in (0..n).rev() {
        let mut s = rhs[i].clone();
        for j in i + 1..n {
            if !a[i][j].is_zero() {
                s -= a[i][j].clone() * x[j].clone();
            }
        }
        x[i] = s / a[i][i].clone();
    }
    let max = pivots.iter().cloned().fold(f64::MIN, f64::max);
    let min = pivots.iter().cloned().fold(f64::MAX, f64::min);
    Ok(HermitianSolve { solution: x, condition_estimate: max / min })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{exact_int, rational};

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn nullspace_of_rank_one_row() {
        let a = ints(&[&[1, 1, 1]]);
        let ns = integer_nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let s: BigInt = v.iter().sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn nullspace_dimension_and_membership() {
        let a = ints(&[&[2, 4, 0, 6], &[1, 2, 1, 1], &[3, 6, 1, 7]]);
        let ns = integer_nullspace(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let dot: BigInt = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
        assert_eq!(integer_nullspace(&[], 3).len(), 3);
    }

    #[test]
    fn hermitian_solve_recovers_solution() {
        let g = vec![vec![exact_int(4, 0), exact_int(1, 1)], vec![exact_int(1, -1), exact_int(3, 0)]];
        let x = vec![exact_int(2, -1), ExactComplex::new(rational(1, 3), rational(0, 1))];
        let b: Vec<ExactComplex> =
            g.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a.clone() * b.clone()).sum()).collect();
        let sol = solve_hermitian(&g, &b).unwrap();
        assert_eq!(sol.solution, x);
        assert!(sol.condition_estimate >= 1.0);
        let bad = vec![vec![exact_int(-1, 0)]];
        assert!(solve_hermitian(&bad, &[exact_int(1, 0)]).is_err());
    }
}
