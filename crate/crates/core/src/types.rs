//! Scalars, points in C^n and multi-indices.
//!
//! Two arithmetic modes coexist: [`ExactComplex`] (pairs of arbitrary
//! precision rationals) for the symbolic layer, and [`Complex64`] for
//! everything that touches quadrature.

use std::fmt;
use std::ops::{Add, Index};

use num_bigint::BigInt;
use num_complex::Complex;
pub use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ExactRational = BigRational;
pub type ExactComplex = Complex<BigRational>;

pub fn rational(num: i64, den: i64) -> ExactRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn exact(re: ExactRational, im: ExactRational) -> ExactComplex {
    Complex::new(re, im)
}

pub fn exact_int(re: i64, im: i64) -> ExactComplex {
    Complex::new(rational(re, 1), rational(im, 1))
}

pub fn exact_real(x: ExactRational) -> ExactComplex {
    Complex::new(x, BigRational::zero())
}

pub fn exact_i() -> ExactComplex {
    exact_int(0, 1)
}

/// `base^k` for a possibly negative exponent.
pub fn rational_pow(base: &ExactRational, k: i64) -> ExactRational {
    let mut acc = BigRational::one();
    for _ in 0..k.unsigned_abs() {
        acc *= base;
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}

pub fn exact_pow(base: &ExactComplex, k: u32) -> ExactComplex {
    let mut acc = ExactComplex::one();
    for _ in 0..k {
        acc *= base.clone();
    }
    acc
}

pub fn rational_to_f64(x: &ExactRational) -> f64 {
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Both parts overflow f64: scale down by a common power of two.
            let shift = x.numer().bits().max(x.denom().bits()).saturating_sub(1000);
            let n = (x.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (x.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

pub fn exact_to_complex(z: &ExactComplex) -> Complex64 {
    Complex64::new(rational_to_f64(&z.re), rational_to_f64(&z.im))
}

/// Exact binary value of a finite double.
pub fn rational_from_f64(x: f64) -> Result<ExactRational> {
    BigRational::from_float(x).ok_or_else(|| Error::InvalidInput(format!("non-finite value {x}")))
}

/// Parses `"a"`, `"-a/b"` or a decimal literal such as `"0.8"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::InvalidInput(s.to_string()))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::InvalidInput(s.to_string()))?;
        if d.is_zero() {
            return Err(Error::InvalidInput(format!("zero denominator in {s}")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let n: BigInt = digits.parse().map_err(|_| Error::InvalidInput(s.to_string()))?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = BigRational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| Error::InvalidInput(s.to_string()))?;
    Ok(BigRational::from_integer(n))
}

pub fn format_rational(x: &ExactRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Finite-check for stored floating values.
pub fn ensure_finite(z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::InvalidInput("non-finite complex value".into()))
    }
}

/// Multi-index `p = (p_1, .., p_n)`; ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exps: Vec<u32>) -> Self {
        MultiIndex(exps)
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The unit index `e_j` (0-based `j`).
    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn plus_unit(&self, j: usize) -> Self {
        let mut v = self.0.clone();
        v[j] += 1;
        MultiIndex(v)
    }

    /// `self - e_j`, or `None` when the j-th exponent is zero.
    pub fn minus_unit(&self, j: usize) -> Option<Self> {
        if self.0[j] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[j] -= 1;
        Some(MultiIndex(v))
    }

    /// `p! = p_1! ... p_n!`
    pub fn factorial(&self) -> BigInt {
        self.0.iter().map(|&e| factorial(e as u64)).fold(BigInt::one(), |a, b| a * b)
    }

    /// All multi-indices of dimension `n` and order exactly `k`, lexicographically.
    pub fn all_of_order(n: usize, k: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if pos + 1 == n {
                cur[pos] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur[pos] = e;
                rec(pos + 1, left - e, cur, out);
            }
        }
        if n == 0 {
            return out;
        }
        rec(0, k, &mut cur, &mut out);
        out.sort();
        out
    }

    /// All multi-indices of order `<= k`, grouped by order, lexicographic within an order.
    pub fn all_up_to(n: usize, k: u32) -> Vec<MultiIndex> {
        (0..=k).flat_map(|d| Self::all_of_order(n, d)).collect()
    }
}

impl Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, j: usize) -> &u32 {
        &self.0[j]
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), rhs.dim());
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.trim().is_empty() {
            return Err(Error::InvalidInput(format!("empty multi-index {s:?}")));
        }
        inner
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| Error::InvalidInput(s.to_string())))
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

pub fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

/// A point `z = (z_1, .., z_n)` of C^n with `z_j = x_j + i x_{n+j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoint(Vec<Complex64>);

impl CPoint {
    pub fn new(coords: Vec<Complex64>) -> Self {
        assert!(!coords.is_empty(), "CPoint needs n >= 1");
        CPoint(coords)
    }

    pub fn origin(n: usize) -> Self {
        CPoint::new(vec![Complex64::zero(); n])
    }

    /// Builds a point from its 2n real coordinates `(x_1, .., x_n, x_{n+1}, .., x_{2n})`.
    pub fn from_real(x: &[f64]) -> Result<Self> {
        if x.is_empty() || !x.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "real coordinate vector must have even positive length, got {}",
                x.len()
            )));
        }
        let n = x.len() / 2;
        Ok(CPoint((0..n).map(|j| Complex64::new(x[j], x[j + n])).collect()))
    }

    pub fn to_real(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; 2 * n];
        for (j, z) in self.0.iter().enumerate() {
            out[j] = z.re;
            out[j + n] = z.im;
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, t: f64) -> CPoint {
        CPoint(self.0.iter().map(|z| z * t).collect())
    }

    pub fn sub(&self, other: &CPoint) -> CPoint {
        CPoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &CPoint) -> CPoint {
        CPoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Hermitian product `sum_j a_j conj(b_j)`.
    pub fn hermitian_dot(&self, other: &CPoint) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<usize> for CPoint {
    type Output = Complex64;
    fn index(&self, j: usize) -> &Complex64 {
        &self.0[j]
    }
}

/// `z^p conj(z)^q`.
pub fn monomial_eval(p: &MultiIndex, q: &MultiIndex, z: &CPoint) -> Result<Complex64> {
    if p.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), found: p.dim() });
    }
    if q.dim() != z.dim() {
        return Err(Error::DimensionMismatch { expected: z.dim(), found: q.dim() });
    }
    Ok(monomial_eval_unchecked(p, q, z))
}

pub(crate) fn monomial_eval_unchecked(p: &MultiIndex, q: &MultiIndex, z: &CPoint) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, zj) in z.coords().iter().enumerate() {
        if p[j] > 0 {
            acc *= zj.powu(p[j]);
        }
        if q[j] > 0 {
            acc *= zj.conj().powu(q[j]);
        }
    }
    acc
}

/// Exact-mode `z^p conj(z)^q`.
pub fn monomial_eval_exact(p: &MultiIndex, q: &MultiIndex, z: &[ExactComplex]) -> Result<ExactComplex> {
    if p.dim() != z.len() || q.dim() != z.len() {
        return Err(Error::DimensionMismatch { expected: z.len(), found: p.dim().max(q.dim()) });
    }
    let mut acc = ExactComplex::one();
    for (j, zj) in z.iter().enumerate() {
        acc = acc * exact_pow(zj, p[j]) * exact_pow(&zj.conj(), q[j]);
    }
    Ok(acc)
}

/// `sum_j |z_j|^2`.
pub fn norm_sq(z: &CPoint) -> f64 {
    let mut acc = crate::par::CompensatedSum::new();
    for c in z.coords() {
        acc.add(c.norm_sqr());
    }
    acc.value()
}

pub fn norm_sq_exact(z: &[ExactComplex]) -> ExactRational {
    z.iter().fold(BigRational::zero(), |acc, c| acc + &c.re * &c.re + &c.im * &c.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn monomial_examples() {
        let z = CPoint::new(vec![c(0.3, -1.0), c(2.0, 0.5)]);
        let one = monomial_eval(&MultiIndex::zeros(2), &MultiIndex::zeros(2), &z).unwrap();
        assert_eq!(one, c(1.0, 0.0));

        let z = CPoint::new(vec![c(1.0, 1.0), c(2.0, 0.0)]);
        let v = monomial_eval(&MultiIndex::new(vec![1, 0]), &MultiIndex::new(vec![0, 1]), &z).unwrap();
        assert_eq!(v, c(2.0, 2.0));

        let z = CPoint::new(vec![c(0.0, 1.0), c(0.0, 0.0)]);
        let v = monomial_eval(&MultiIndex::new(vec![2, 0]), &MultiIndex::zeros(2), &z).unwrap();
        assert!((v - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn monomial_dimension_mismatch() {
        let z = CPoint::origin(2);
        let err = monomial_eval(&MultiIndex::zeros(3), &MultiIndex::zeros(2), &z).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 2, found: 3 });
    }

    #[test]
    fn norm_sq_examples() {
        assert_eq!(norm_sq(&CPoint::origin(2)), 0.0);
        assert_eq!(norm_sq(&CPoint::new(vec![c(1.0, 0.0), c(0.0, 1.0)])), 2.0);
        assert_eq!(norm_sq(&CPoint::new(vec![c(3.0, 4.0), c(0.0, 0.0)])), 25.0);
    }

    #[test]
    fn real_and_complex_views_agree() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let z = CPoint::from_real(&x).unwrap();
        assert_eq!(z[0], c(1.0, 3.0));
        assert_eq!(z[1], c(2.0, 4.0));
        assert_eq!(z.to_real(), x.to_vec());
        assert!(CPoint::from_real(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn multi_index_enumeration() {
        let all = MultiIndex::all_up_to(2, 4);
        assert_eq!(all.len(), 15);
        assert_eq!(MultiIndex::all_of_order(3, 2).len(), 6);
        assert_eq!(all[0], MultiIndex::zeros(2));
        assert_eq!("(1, 2)".parse::<MultiIndex>().unwrap(), MultiIndex::new(vec![1, 2]));
    }

    #[test]
    fn parse_rational_forms() {
        assert_eq!(parse_rational("0.8").unwrap(), rational(4, 5));
        assert_eq!(parse_rational("-3/6").unwrap(), rational(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rational(7, 1));
        assert_eq!(parse_rational("-0.25").unwrap(), rational(-1, 4));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = rational_pow(&rational(10, 1), 400) / rational_pow(&rational(10, 1), 399);
        assert_eq!(rational_to_f64(&big), 10.0);
        let r = BigRational::new(num_traits::pow(BigInt::from(3), 700), num_traits::pow(BigInt::from(3), 699) * 2);
        assert!((rational_to_f64(&r) - 1.5).abs() < 1e-12);
    }

    fn small_rat() -> impl Strategy<Value = ExactRational> {
        (-20i64..20, 1i64..9).prop_map(|(a, b)| rational(a, b))
    }

    fn small_exact() -> impl Strategy<Value = ExactComplex> {
        (small_rat(), small_rat()).prop_map(|(a, b)| exact(a, b))
    }

    fn point2() -> impl Strategy<Value = CPoint> {
        prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 2)
            .prop_map(|v| CPoint::new(v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    fn index2() -> impl Strategy<Value = MultiIndex> {
        prop::collection::vec(0u32..4, 2).prop_map(MultiIndex::new)
    }

    proptest! {
        #[test]
        fn exact_field_axioms(a in small_exact(), b in small_exact(), c in small_exact()) {
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            if !a.is_zero() {
                prop_assert_eq!(a.clone() * (ExactComplex::one() / a.clone()), ExactComplex::one());
            }
        }

        #[test]
        fn float_field_axioms(a in (-3.0f64..3.0, -3.0f64..3.0), b in (-3.0f64..3.0, -3.0f64..3.0), cc in (-3.0f64..3.0, -3.0f64..3.0)) {
            let (a, b, cc) = (c(a.0, a.1), c(b.0, b.1), c(cc.0, cc.1));
            prop_assert!(((a * b) * cc - a * (b * cc)).norm() <= 1e-13);
            prop_assert!((a * (b + cc) - (a * b + a * cc)).norm() <= 1e-13);
        }

        #[test]
        fn monomial_product_rule(p in index2(), q in index2(), p2 in index2(), q2 in index2(), z in point2()) {
            let lhs = monomial_eval(&p, &q, &z).unwrap() * monomial_eval(&p2, &q2, &z).unwrap();
            let rhs = monomial_eval(&(&p + &p2), &(&q + &q2), &z).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn monomial_product_rule_exact(p in index2(), q in index2(), p2 in index2(), q2 in index2(),
                                       z in prop::collection::vec(small_exact(), 2)) {
            let lhs = monomial_eval_exact(&p, &q, &z).unwrap() * monomial_eval_exact(&p2, &q2, &z).unwrap();
            let rhs = monomial_eval_exact(&(&p + &p2), &(&q + &q2), &z).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn norm_sq_symmetries(z in point2(), theta in 0.0f64..6.3) {
            let base = norm_sq(&z);
            let swapped = CPoint::new(vec![z[1], z[0]]);
            prop_assert!((norm_sq(&swapped) - base).abs() <= 1e-14 * (1.0 + base));
            let rotated = CPoint::new(vec![z[0] * Complex64::from_polar(1.0, theta), z[1]]);
            prop_assert!((norm_sq(&rotated) - base).abs() <= 1e-13 * (1.0 + base));
            prop_assert!(base >= 0.0);
        }
    }
}
