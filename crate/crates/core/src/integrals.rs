//! Closed-form integrals of Kelvin functions over spheres, balls and ball
//! complements centred at the origin.
//!
//! Every result is `pi^n` times a finite sum `sum_k c_k R^k` with exact
//! complex-rational `c_k`, held in a [`RadialValue`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::kelvin::KelvinFunction;
use crate::quadrature::unit_moment_over_pi_n;
use crate::types::{
    exact_real, exact_to_complex, format_rational, rational, rational_pow, ExactComplex, ExactRational,
};

/// An exact multiple `coeff * pi^power`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiMultiple {
    pub coeff: ExactComplex,
    pub pi_power: u32,
}

impl PiMultiple {
    pub fn zero(pi_power: u32) -> Self {
        PiMultiple { coeff: ExactComplex::zero(), pi_power }
    }

    pub fn to_complex(&self) -> Complex64 {
        exact_to_complex(&self.coeff) * PI.powi(self.pi_power as i32)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.pi_power, other.pi_power);
        PiMultiple { coeff: self.coeff.clone() + other.coeff.clone(), pi_power: self.pi_power }
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        PiMultiple { coeff: self.coeff.clone() * c.clone(), pi_power: self.pi_power }
    }

    pub fn conj(&self) -> Self {
        PiMultiple { coeff: self.coeff.conj(), pi_power: self.pi_power }
    }
}

impl fmt::Display for PiMultiple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re = format_rational(&self.coeff.re);
        let im = format_rational(&self.coeff.im);
        write!(f, "({re} + {im}i)*pi^{}", self.pi_power)
    }
}

/// `pi^n * sum_k c_k R^k` as an exact function of the radius `R`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RadialValue {
    pi_power: u32,
    terms: BTreeMap<i64, ExactComplex>,
}

impl RadialValue {
    pub fn zero(pi_power: u32) -> Self {
        RadialValue { pi_power, terms: BTreeMap::new() }
    }

    fn add_term(&mut self, exponent: i64, c: ExactComplex) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponent).or_insert_with(ExactComplex::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn pi_power(&self) -> u32 {
        self.pi_power
    }

    /// Non-zero `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (&i64, &ExactComplex)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when only the `R^0` coefficient survives.
    pub fn is_radius_independent(&self) -> bool {
        self.terms.keys().all(|&k| k == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        let mut out = Self::zero(self.pi_power);
        for (k, v) in &self.terms {
            out.add_term(*k, v.clone() * c.clone());
        }
        out
    }

    /// Multiplies by `R^k`.
    pub fn shift(&self, k: i64) -> Self {
        RadialValue { pi_power: self.pi_power, terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn at(&self, radius: &ExactRational) -> PiMultiple {
        let mut coeff = ExactComplex::zero();
        for (k, c) in &self.terms {
            coeff += c.clone() * exact_real(rational_pow(radius, *k));
        }
        PiMultiple { coeff, pi_power: self.pi_power }
    }

    pub fn to_complex(&self, radius: f64) -> Complex64 {
        let mut acc = Complex64::zero();
        for (k, c) in &self.terms {
            acc += exact_to_complex(c) * radius.powi(*k as i32);
        }
        acc * PI.powi(self.pi_power as i32)
    }
}

/// Exponent `e` with `int_{S_rho} term ds = C rho^e`, and `C / pi^n`.
fn sphere_terms(f: &KelvinFunction) -> Vec<(i64, ExactComplex)> {
    let n = f.dim() as i64;
    f.terms()
        .filter(|(k, _)| k.p == k.q)
        .map(|(k, c)| {
            let e = 2 * n - 1 + 2 * k.p.order() as i64 - 2 * k.m as i64;
            (e, c.clone() * exact_real(unit_moment_over_pi_n(&k.p, &k.q)))
        })
        .collect()
}

/// `int_{|z| = R} f ds` as a function of `R`.
pub fn sphere_integral(f: &KelvinFunction) -> RadialValue {
    let mut out = RadialValue::zero(f.dim() as u32);
    for (e, c) in sphere_terms(f) {
        out.add_term(e, c);
    }
    out
}

/// `int_{|z| < R} f dx`; diverges when some term is not integrable at 0.
pub fn ball_integral(f: &KelvinFunction) -> Result<RadialValue> {
    let mut out = RadialValue::zero(f.dim() as u32);
    for (e, c) in sphere_terms(f) {
        if e < 0 {
            return Err(Error::DivergentIntegral { exponent: e });
        }
        out.add_term(e + 1, c * exact_real(rational(1, e + 1)));
    }
    Ok(out)
}

/// `int_{|z| > R} f dx`; diverges when some term does not decay fast enough.
pub fn exterior_integral(f: &KelvinFunction) -> Result<RadialValue> {
    let mut out = RadialValue::zero(f.dim() as u32);
    for (e, c) in sphere_terms(f) {
        if e + 1 >= 0 {
            return Err(Error::DivergentIntegral { exponent: e });
        }
        out.add_term(e + 1, c * exact_real(rational(-1, e + 1)));
    }
    Ok(out)
}

/// `(1 / pi^n) int_{|z| = R} f conj(g) ds` for polynomials or Kelvin functions.
pub fn sphere_inner(f: &KelvinFunction, g: &KelvinFunction, radius: &ExactRational) -> ExactComplex {
    sphere_integral(&f.mul(&g.conj())).at(radius).coeff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{exact_int, MultiIndex};

    fn r(v: i64) -> ExactRational {
        rational(v, 1)
    }

    #[test]
    fn sphere_moments() {
        let one = KelvinFunction::one(2);
        let s = sphere_integral(&one);
        assert_eq!(s.at(&r(1)).coeff, exact_int(2, 0));
        assert_eq!(s.at(&r(2)).coeff, exact_int(16, 0));
        let z1 = KelvinFunction::z(2, 0);
        assert_eq!(sphere_integral(&z1.mul(&z1.conj())).at(&r(1)).coeff, exact_int(1, 0));
        assert!(sphere_integral(&z1).is_zero());
    }

    #[test]
    fn exterior_energy_of_fundamental_solution() {
        let v = KelvinFunction::inverse_norm_power(2, 1);
        let mut acc = RadialValue::zero(2);
        for j in 0..2 {
            let d = v.dbar(j).unwrap();
            acc = acc.add(&exterior_integral(&d.conj().mul(&d)).unwrap());
        }
        assert_eq!(acc.at(&r(1)).coeff, exact_int(1, 0));
        assert_eq!(acc.to_complex(1.0).re, PI * PI);
    }

    #[test]
    fn divergence_detected() {
        let v = KelvinFunction::inverse_norm_power(2, 2);
        assert!(matches!(ball_integral(&v), Err(Error::DivergentIntegral { .. })));
        assert!(matches!(exterior_integral(&KelvinFunction::one(2)), Err(Error::DivergentIntegral { .. })));
        let vol = ball_integral(&KelvinFunction::one(2)).unwrap();
        assert_eq!(vol.at(&r(1)).coeff, ExactComplex::new(rational(1, 2), rational(0, 1)));
    }

    #[test]
    fn radial_value_radius_independence() {
        let p = MultiIndex::new(vec![1, 1]);
        let f = KelvinFunction::monomial(p.clone(), p).mul(&KelvinFunction::inverse_norm_power(2, 3));
        let s = sphere_integral(&f);
        assert!(!s.is_radius_independent());
        assert!(s.shift(-1).is_radius_independent());
        assert!(!sphere_integral(&KelvinFunction::one(2)).is_radius_independent());
    }
}
