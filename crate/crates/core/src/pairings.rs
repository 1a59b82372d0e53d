//! Surface pairings between holomorphic functions and Kelvin-class vectors.
//!
//! For a holomorphic `u` and a row `g = (g_1, .., g_n)`,
//!
//! ```text
//! <u, g>_3 = int_{|z| = R} sum_j conj(g_j) u kappa_j ds,   kappa_j = c_n z_j / R,
//! ```
//!
//! and `<u, v> = <u, dbar v>_3` for scalar `v`. The pairing is linear in `u`
//! and conjugate-linear in `g` (or `v`).
//!
//! Every pairing has an exact path (closed-form sphere moments, giving an
//! exact function of `R`) and a quadrature path; reports carry both and
//! their discrepancy.

use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::harmonics::{kelvin_extend, polynomial_degree, BoundaryExpansion, HarmonicFamily};
use crate::integrals::{exterior_integral, sphere_integral, PiMultiple, RadialValue};
use crate::kelvin::{KelvinFunction, KelvinVector};
use crate::par::{self, Execution};
use crate::potentials::surface_form_constant_exact;
use crate::quadrature::SphereQuadrature;
use crate::types::{exact_int, rational_from_f64, rational_to_f64, ExactComplex, MultiIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairingMethod {
    Exact,
    Quadrature,
    ExactAndQuadrature,
}

impl PairingMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            PairingMethod::Exact => "exact",
            PairingMethod::Quadrature => "quadrature",
            PairingMethod::ExactAndQuadrature => "exact+quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingReport {
    pub value_exact: Option<Complex64>,
    /// Exact value as a multiple of `pi^n`.
    pub exact_repr: Option<String>,
    #[serde(skip)]
    pub exact: Option<PiMultiple>,
    pub value_quadrature: Option<Complex64>,
    pub radius: f64,
    pub discrepancy: Option<f64>,
    pub method: PairingMethod,
}

impl PairingReport {
    /// The authoritative value: exact when available.
    pub fn value(&self) -> Complex64 {
        self.value_exact.or(self.value_quadrature).unwrap_or_default()
    }
}

/// `sum_j conj(g_j) u c_n z_j`; dividing its sphere integral by `R` gives the pairing.
pub fn pairing_integrand(u: &KelvinFunction, g: &KelvinVector) -> Result<KelvinFunction> {
    let n = u.dim();
    if g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.dim() });
    }
    if !u.is_holomorphic() {
        return Err(Error::NotHolomorphic);
    }
    let c = surface_form_constant_exact(n);
    let mut acc = KelvinFunction::zero(n);
    for (j, gj) in g.components.iter().enumerate() {
        acc = acc.add(&gj.conj().mul(u).mul(&KelvinFunction::z(n, j)));
    }
    Ok(acc.scale(&c))
}

/// `<u, g>_3` as an exact function of the radius.
pub fn grothendieck_pairing_exact(u: &KelvinFunction, g: &KelvinVector) -> Result<RadialValue> {
    Ok(sphere_integral(&pairing_integrand(u, g)?).shift(-1))
}

fn check_radius(radius: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
    }
    Ok(())
}

fn quadrature_value(integrand: &KelvinFunction, radius: f64, quad: &SphereQuadrature) -> Result<Complex64> {
    if quad.dim() != integrand.dim() {
        return Err(Error::DimensionMismatch { expected: integrand.dim(), found: quad.dim() });
    }
    let rule = if (quad.radius() - radius).abs() > 0.0 { quad.rescaled(radius)? } else { quad.clone() };
    let f = integrand.compile();
    Ok(rule.integrate(|z| f.evaluate(z).unwrap_or(Complex64::new(f64::NAN, 0.0)))? / radius)
}

/// `<u, g>_3` on `|z| = radius`, exactly and (when `quad` is given) by quadrature.
pub fn grothendieck_pairing(
    u: &KelvinFunction,
    g: &KelvinVector,
    radius: f64,
    quad: Option<&SphereQuadrature>,
) -> Result<PairingReport> {
    check_radius(radius)?;
    let integrand = pairing_integrand(u, g)?;
    let exact = sphere_integral(&integrand).shift(-1).at(&rational_from_f64(radius)?);
    let value_exact = exact.to_complex();
    let value_quadrature = quad.map(|q| quadrature_value(&integrand, radius, q)).transpose()?;
    let discrepancy = value_quadrature.map(|q| (q - value_exact).norm());
    Ok(PairingReport {
        value_exact: Some(value_exact),
        exact_repr: Some(exact.to_string()),
        exact: Some(exact),
        value_quadrature,
        radius,
        discrepancy,
        method: if quad.is_some() { PairingMethod::ExactAndQuadrature } else { PairingMethod::Exact },
    })
}

/// `dbar v` after checking `dbar^* dbar v = 0` symbolically.
pub fn pairing_vector(v: &KelvinFunction) -> Result<KelvinVector> {
    let g = v.dbar_vector();
    if !g.adjoint_divergence().is_zero() {
        return Err(Error::NotHarmonic);
    }
    Ok(g)
}

/// `<u, v> = <u, dbar v>_3`.
pub fn paper_pairing(
    u: &KelvinFunction,
    v: &KelvinFunction,
    radius: f64,
    quad: Option<&SphereQuadrature>,
) -> Result<PairingReport> {
    grothendieck_pairing(u, &pairing_vector(v)?, radius, quad)
}

/// `<u, v>` as an exact function of the radius.
pub fn paper_pairing_exact(u: &KelvinFunction, v: &KelvinFunction) -> Result<RadialValue> {
    grothendieck_pairing_exact(u, &pairing_vector(v)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourReport {
    pub radii: Vec<f64>,
    pub exact_values: Vec<Complex64>,
    pub quadrature_values: Vec<Complex64>,
    /// True when the exact pairing has no `R^k` term with `k != 0`.
    pub radius_independent: bool,
    /// Largest pairwise difference of the exact values, computed exactly.
    pub exact_deviation: f64,
    pub quadrature_deviation: Option<f64>,
}

fn max_pairwise(values: &[Complex64]) -> f64 {
    let mut m: f64 = 0.0;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            m = m.max((a - b).norm());
        }
    }
    m
}

/// `<u, v>` across several radii.
pub fn contour_independence(
    u: &KelvinFunction,
    v: &KelvinFunction,
    radii: &[f64],
    quad: Option<&SphereQuadrature>,
) -> Result<ContourReport> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("no radii given".into()));
    }
    radii.iter().try_for_each(|&r| check_radius(r))?;
    let g = pairing_vector(v)?;
    let integrand = pairing_integrand(u, &g)?;
    let radial = sphere_integral(&integrand).shift(-1);
    let exact: Vec<PiMultiple> = radii.iter().map(|&r| Ok(radial.at(&rational_from_f64(r)?))).collect::<Result<_>>()?;
    let mut exact_deviation: f64 = 0.0;
    for (i, a) in exact.iter().enumerate() {
        for b in &exact[i + 1..] {
            let d = a.coeff.clone() - b.coeff.clone();
            let diff = PiMultiple { coeff: d, pi_power: a.pi_power }.to_complex().norm();
            exact_deviation = exact_deviation.max(diff);
        }
    }
    let quadrature_values = match quad {
        Some(q) => radii.iter().map(|&r| quadrature_value(&integrand, r, q)).collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let quadrature_deviation = quad.map(|_| max_pairwise(&quadrature_values));
    Ok(ContourReport {
        radii: radii.to_vec(),
        exact_values: exact.iter().map(PiMultiple::to_complex).collect(),
        quadrature_values,
        radius_independent: radial.is_radius_independent(),
        exact_deviation,
        quadrature_deviation,
    })
}

/// `g^{(p)} = dbar(z^p |z|^{-(2n + 2|p| - 2)})`, the Kelvin extension of `z^p`
/// under `dbar`.
pub fn contrast_vector(p: &MultiIndex) -> Result<KelvinVector> {
    Ok(kelvin_extend(&KelvinFunction::holomorphic_monomial(p.clone()))?.dbar_vector())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Annihilator,
    Contrast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairingRow {
    pub kind: RowKind,
    /// Exponent of the holomorphic argument `z^s`.
    pub s: MultiIndex,
    /// `q` of `g^{(0,q)}` for annihilator rows, `p` of `g^{(p)}` for contrast rows.
    pub q_or_p: MultiIndex,
    pub report: PairingReport,
}

/// `<z^s, g^{(0,q)}>_3` for every `|s| <= s_max` and every `q` in `q_list`,
/// followed by the contrast rows `<z^p, g^{(p)}>_3`.
pub fn annihilator_suite(
    n: usize,
    q_list: &[MultiIndex],
    s_max: u32,
    contrast: &[MultiIndex],
    radius: f64,
    quad: Option<&SphereQuadrature>,
    exec: Execution,
) -> Result<Vec<PairingRow>> {
    for q in q_list {
        if q.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: q.dim() });
        }
        if q.order() == 0 {
            return Err(Error::InvalidInput("annihilator rows need |q| >= 1".into()));
        }
    }
    let zero = MultiIndex::zeros(n);
    let mut cells: Vec<(RowKind, MultiIndex, MultiIndex)> = Vec::new();
    for q in q_list {
        for s in MultiIndex::all_up_to(n, s_max) {
            cells.push((RowKind::Annihilator, s, q.clone()));
        }
    }
    for p in contrast {
        cells.push((RowKind::Contrast, p.clone(), p.clone()));
    }
    let quad = quad.map(|q| q.rescaled(radius)).transpose()?;
    let inner = match quad {
        Some(_) => Execution::Sequential,
        None => exec,
    };
    let rows = par::map_slice(exec, &cells, |(kind, s, q)| -> Result<PairingRow> {
        let g = match kind {
            RowKind::Annihilator => crate::kelvin::make_annihilator(&zero, q, n)?,
            RowKind::Contrast => contrast_vector(q)?,
        };
        let u = KelvinFunction::holomorphic_monomial(s.clone());
        let report = match &quad {
            Some(rule) => {
                let mut r = grothendieck_pairing(&u, &g, radius, None)?;
                let integrand = pairing_integrand(&u, &g)?;
                let f = integrand.compile();
                let rule = rule.clone();
                let v =
                    rule.integrate_with(inner, |z| f.evaluate(z).unwrap_or(Complex64::new(f64::NAN, 0.0)))? / radius;
                r.value_quadrature = Some(v);
                r.discrepancy = r.value_exact.map(|e| (e - v).norm());
                r.method = PairingMethod::ExactAndQuadrature;
                r
            }
            None => grothendieck_pairing(&u, &g, radius, None)?,
        };
        Ok(PairingRow { kind: *kind, s: s.clone(), q_or_p: q.clone(), report })
    });
    rows.into_iter().collect()
}

/// `-(2i)^n`, the ratio between `<w, v>` on the sphere and the exterior
/// energy `sum_j ||dbar_j v||^2` that comes from `dzb ^ dz = (2i)^n dx`.
pub fn energy_normalization(n: usize) -> ExactComplex {
    let mut c = exact_int(-1, 0);
    for _ in 0..n {
        c *= exact_int(0, 2);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub radius: f64,
    /// `w`: the holomorphic interior Dirichlet extension of the trace of `v`.
    pub interior: String,
    pub pairing: Complex64,
    pub pairing_repr: String,
    pub energy: Complex64,
    pub energy_repr: String,
    /// `pairing / (-(2i)^n)`.
    pub normalized_pairing: Complex64,
    /// Exact equality `pairing = -(2i)^n energy`.
    pub identity_holds: bool,
    pub pairing_quadrature: Option<Complex64>,
}

/// Compares `<w, v>` on `|z| = R` with `sum_j ||dbar_j v||^2` over `|z| > R`,
/// where `w` is the interior harmonic extension of the trace of `v`, which
/// must be holomorphic.
pub fn energy_identity_check(v: &KelvinFunction, radius: f64, quad: Option<&SphereQuadrature>) -> Result<EnergyReport> {
    check_radius(radius)?;
    let n = v.dim();
    let r = rational_from_f64(radius)?;
    let degree = polynomial_degree(&v.trace_on_sphere(&r));
    let family = Arc::new(HarmonicFamily::build(n, degree));
    let w = BoundaryExpansion::from_trace_exact(v, &r, family)?.dirichlet_interior();
    if !w.is_holomorphic() {
        return Err(Error::NotHolomorphic);
    }
    let report = paper_pairing(&w, v, radius, quad)?;
    let pairing = report.exact.clone().expect("exact path present");
    let mut energy = PiMultiple::zero(n as u32);
    for j in 0..n {
        let d = v.dbar(j)?;
        energy = energy.add(&exterior_integral(&d.conj().mul(&d))?.at(&r));
    }
    let norm = energy_normalization(n);
    let identity_holds = pairing.coeff == energy.coeff.clone() * norm.clone();
    let normalized = PiMultiple { coeff: pairing.coeff.clone() / norm, pi_power: pairing.pi_power };
    Ok(EnergyReport {
        radius,
        interior: w.to_string(),
        pairing: pairing.to_complex(),
        pairing_repr: pairing.to_string(),
        energy: energy.to_complex(),
        energy_repr: energy.to_string(),
        normalized_pairing: normalized.to_complex(),
        identity_holds,
        pairing_quadrature: report.value_quadrature,
    })
}

/// `f_v(z^s) = <z^s, v>` for all `|s| <= s_max`.
pub fn dual_functional(v: &KelvinFunction, s_max: u32, radius: f64) -> Result<Vec<(MultiIndex, PiMultiple)>> {
    check_radius(radius)?;
    let g = pairing_vector(v)?;
    let r = rational_from_f64(radius)?;
    MultiIndex::all_up_to(v.dim(), s_max)
        .into_iter()
        .map(|s| {
            let value = grothendieck_pairing_exact(&KelvinFunction::holomorphic_monomial(s.clone()), &g)?.at(&r);
            Ok((s, value))
        })
        .collect()
}

/// `sum_k c_k z^{-k}` written in the Kelvin class as `c_k zb^k |z|^{-2k}` (`n = 1`).
pub fn principal_part(coeffs: &[(u32, ExactComplex)]) -> Result<KelvinFunction> {
    let mut h = KelvinFunction::zero(1);
    for (k, c) in coeffs {
        if *k == 0 {
            return Err(Error::InvalidInput("principal part must vanish at infinity".into()));
        }
        h = h.add(&KelvinFunction::term(1, c.clone(), MultiIndex::zeros(1), MultiIndex::new(vec![*k]), *k));
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyReport {
    pub exact: Complex64,
    pub quadrature: Option<Complex64>,
}

/// `int_{|z| = R} h u dz` for `n = 1`.
pub fn cauchy_pairing_1d(
    u: &KelvinFunction,
    h: &KelvinFunction,
    radius: f64,
    quad: Option<&SphereQuadrature>,
) -> Result<CauchyReport> {
    if u.dim() != 1 || h.dim() != 1 {
        return Err(Error::Unsupported("the curvilinear pairing is defined for n = 1".into()));
    }
    if !u.is_holomorphic() {
        return Err(Error::NotHolomorphic);
    }
    check_radius(radius)?;
    // On |z| = R, dz = kappa ds with kappa = i z / R.
    let integrand = h.mul(u).mul(&KelvinFunction::z(1, 0)).scale(&exact_int(0, 1));
    let exact = sphere_integral(&integrand).shift(-1).to_complex(radius);
    let quadrature = quad.map(|q| quadrature_value(&integrand, radius, q)).transpose()?;
    Ok(CauchyReport { exact, quadrature })
}

/// `sum_{|s| <= deg} a_s z^s` with small random Gaussian-integer coefficients.
pub fn random_holomorphic(n: usize, degree: u32, rng: &mut ChaCha8Rng) -> KelvinFunction {
    let mut f = KelvinFunction::zero(n);
    for s in MultiIndex::all_up_to(n, degree) {
        let c = exact_int(rng.random_range(-3..=3), rng.random_range(-3..=3));
        if !c.is_zero() {
            f = f.add(&KelvinFunction::holomorphic_monomial(s).scale(&c));
        }
    }
    f
}

/// A non-zero element `sum_p a_p z^p |z|^{-(2n + 2|p| - 2)}` of the exterior
/// class with holomorphic boundary trace.
pub fn random_admissible(n: usize, degree: u32, rng: &mut ChaCha8Rng) -> KelvinFunction {
    loop {
        let mut v = KelvinFunction::zero(n);
        for p in MultiIndex::all_up_to(n, degree) {
            let c = exact_int(rng.random_range(-2..=2), rng.random_range(-2..=2));
            if !c.is_zero() {
                let ext = kelvin_extend(&KelvinFunction::holomorphic_monomial(p)).expect("monomials are harmonic");
                v = v.add(&ext.scale(&c));
            }
        }
        if !v.is_zero() {
            return v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub batch: usize,
    pub s_max: u32,
    /// Number of `v` whose functional vanishes on every `z^s`, `|s| <= s_max`.
    pub annihilating: usize,
    /// Smallest `max_s |f_v(z^s)|` over the batch.
    pub min_max_coefficient: f64,
}

/// Draws `batch` admissible `v` and checks whether any `f_v` vanishes on all
/// monomials up to `s_max`.
pub fn density_probe(
    n: usize,
    s_max: u32,
    batch: usize,
    radius: f64,
    seed: u64,
    exec: Execution,
) -> Result<DensityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vs: Vec<KelvinFunction> = (0..batch).map(|_| random_admissible(n, s_max, &mut rng)).collect();
    let maxima = par::map_slice(exec, &vs, |v| -> Result<(bool, f64)> {
        let coeffs = dual_functional(v, s_max, radius)?;
        let all_zero = coeffs.iter().all(|(_, c)| c.is_zero());
        let m = coeffs.iter().map(|(_, c)| c.to_complex().norm()).fold(0.0, f64::max);
        Ok((all_zero, m))
    });
    let mut annihilating = 0;
    let mut min_max = f64::INFINITY;
    for m in maxima {
        let (z, v) = m?;
        annihilating += usize::from(z);
        min_max = min_max.min(v);
    }
    Ok(DensityReport { batch, s_max, annihilating, min_max_coefficient: min_max })
}

/// Relative size of an exact multiple of `pi^n`, for reports.
pub fn pi_multiple_f64(x: &PiMultiple) -> (f64, f64) {
    (rational_to_f64(&x.coeff.re), rational_to_f64(&x.coeff.im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kelvin::make_annihilator;
    use std::f64::consts::PI;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    fn quad() -> SphereQuadrature {
        SphereQuadrature::build_default(2, 1.0).unwrap()
    }

    #[test]
    fn annihilator_examples() {
        let g = make_annihilator(&mi(&[0, 0]), &mi(&[1, 0]), 2).unwrap();
        let q = quad();
        for s in MultiIndex::all_up_to(2, 4) {
            let r = grothendieck_pairing(&KelvinFunction::holomorphic_monomial(s), &g, 0.8, Some(&q)).unwrap();
            assert!(r.exact.unwrap().is_zero());
            assert!(r.value_quadrature.unwrap().norm() < 1e-8);
        }
        let r = grothendieck_pairing(&KelvinFunction::zero(2), &g, 1.0, None).unwrap();
        assert_eq!(r.value(), Complex64::new(0.0, 0.0));
        assert_eq!(
            grothendieck_pairing(&KelvinFunction::zbar(2, 0), &g, 1.0, None).unwrap_err(),
            Error::NotHolomorphic
        );
    }

    #[test]
    fn contrast_values() {
        let q = quad();
        // g^{(0)} = dbar |z|^{-2}.
        let r = grothendieck_pairing(&KelvinFunction::one(2), &contrast_vector(&mi(&[0, 0])).unwrap(), 1.0, Some(&q))
            .unwrap();
        assert_eq!(r.exact.as_ref().unwrap().coeff, exact_int(4, 0));
        assert!(r.discrepancy.unwrap() < 1e-8);
        // g^{(0,0)} = dbar(2 |z|^{-2}) = 2 g^{(0)}.
        let g00 = make_annihilator(&mi(&[0, 0]), &mi(&[0, 0]), 2).unwrap();
        let r = grothendieck_pairing(&KelvinFunction::one(2), &g00, 1.0, None).unwrap();
        assert_eq!(r.exact.unwrap().coeff, exact_int(8, 0));
        let z1 = KelvinFunction::z(2, 0);
        let v = kelvin_extend(&z1).unwrap();
        let r = paper_pairing(&z1, &v, 1.0, Some(&q)).unwrap();
        assert_eq!(r.exact.as_ref().unwrap().coeff, exact_int(4, 0));
        assert!((r.value() - Complex64::new(4.0 * PI * PI, 0.0)).norm() < 1e-12);
        assert!(r.discrepancy.unwrap() < 1e-8);
    }

    #[test]
    fn paper_pairing_orthogonality() {
        let v = kelvin_extend(&KelvinFunction::one(2)).unwrap();
        for s in MultiIndex::all_up_to(2, 3) {
            if s.order() == 0 {
                continue;
            }
            let r = paper_pairing(&KelvinFunction::holomorphic_monomial(s), &v, 0.7, None).unwrap();
            assert!(r.exact.unwrap().is_zero());
        }
        assert!(paper_pairing(&KelvinFunction::zero(2), &v, 1.0, None).unwrap().exact.unwrap().is_zero());
        assert_eq!(
            paper_pairing(
                &KelvinFunction::one(2),
                &KelvinFunction::norm_sq_poly(2).mul(&KelvinFunction::z(2, 0)),
                1.0,
                None
            )
            .unwrap_err(),
            Error::NotHarmonic
        );
    }

    #[test]
    fn contour_independence_examples() {
        let u = KelvinFunction::holomorphic_monomial(mi(&[1, 1]));
        let v = kelvin_extend(&u).unwrap();
        let r = contour_independence(&u, &v, &[0.6, 0.8, 0.95], Some(&quad())).unwrap();
        assert!(r.radius_independent);
        assert_eq!(r.exact_deviation, 0.0);
        assert!(r.quadrature_deviation.unwrap() <= 1e-10);
        let r = contour_independence(
            &KelvinFunction::one(2),
            &kelvin_extend(&KelvinFunction::one(2)).unwrap(),
            &[0.5, 1.0],
            None,
        )
        .unwrap();
        for v in &r.exact_values {
            assert!((v - Complex64::new(4.0 * PI * PI, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn sesquilinearity() {
        let u1 = KelvinFunction::z(2, 0);
        let u2 = KelvinFunction::holomorphic_monomial(mi(&[0, 1]));
        let v = kelvin_extend(&KelvinFunction::z(2, 0)).unwrap().add(&kelvin_extend(&u2).unwrap());
        let a = exact_int(2, -3);
        let lhs = paper_pairing_exact(&u1.scale(&a).add(&u2), &v).unwrap();
        let rhs = paper_pairing_exact(&u1, &v).unwrap().scale(&a).add(&paper_pairing_exact(&u2, &v).unwrap());
        assert_eq!(lhs, rhs);
        let lhs = paper_pairing_exact(&u1, &v.scale(&a)).unwrap();
        let rhs = paper_pairing_exact(&u1, &v).unwrap().scale(&a.conj());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn energy_examples() {
        let v = kelvin_extend(&KelvinFunction::z(2, 0)).unwrap();
        let r = energy_identity_check(&v, 1.0, Some(&quad())).unwrap();
        assert!(r.identity_holds);
        assert!((r.pairing - Complex64::new(4.0 * PI * PI, 0.0)).norm() < 1e-12);
        assert!((r.energy - Complex64::new(PI * PI, 0.0)).norm() < 1e-12);
        let v = kelvin_extend(&KelvinFunction::one(2)).unwrap();
        let r = energy_identity_check(&v, 1.0, None).unwrap();
        assert!((r.energy.re - PI * PI).abs() < 1e-12);
        assert!(r.identity_holds);
        let r = energy_identity_check(&KelvinFunction::zero(2), 1.0, None).unwrap();
        assert_eq!(r.energy, Complex64::new(0.0, 0.0));
        let not_cr = kelvin_extend(&KelvinFunction::zbar(2, 0)).unwrap();
        assert_eq!(energy_identity_check(&not_cr, 1.0, None).unwrap_err(), Error::NotHolomorphic);
    }

    #[test]
    fn dual_functional_examples() {
        let v = kelvin_extend(&KelvinFunction::one(2)).unwrap();
        let f = dual_functional(&v, 3, 1.0).unwrap();
        for (s, c) in &f {
            assert_eq!(c.is_zero(), s.order() != 0);
        }
        let h = KelvinFunction::z(2, 0).add(&KelvinFunction::z(2, 1));
        let f = dual_functional(&kelvin_extend(&h).unwrap(), 3, 1.0).unwrap();
        let nonzero: Vec<_> = f.iter().filter(|(_, c)| !c.is_zero()).collect();
        assert_eq!(nonzero.len(), 2);
        assert_eq!(nonzero[0].1, nonzero[1].1);
        assert!(dual_functional(&KelvinFunction::zero(2), 3, 1.0).unwrap().iter().all(|(_, c)| c.is_zero()));
    }

    #[test]
    fn residue_table() {
        let q = SphereQuadrature::build_default(1, 1.0).unwrap();
        for k in 0..=6u32 {
            for m in 1..=7u32 {
                let u = KelvinFunction::holomorphic_monomial(mi(&[k]));
                let h = principal_part(&[(m, exact_int(1, 0))]).unwrap();
                let r = cauchy_pairing_1d(&u, &h, 1.3, Some(&q)).unwrap();
                let expect = if m == k + 1 { Complex64::new(0.0, 2.0 * PI) } else { Complex64::new(0.0, 0.0) };
                assert!((r.exact - expect).norm() < 1e-12);
                assert!((r.quadrature.unwrap() - expect).norm() < 1e-10);
            }
        }
        assert!(principal_part(&[(0, exact_int(1, 0))]).is_err());
    }

    #[test]
    fn density_probe_finds_no_annihilator() {
        let r = density_probe(2, 3, 8, 1.0, 7, Execution::default()).unwrap();
        assert_eq!(r.annihilating, 0);
        assert!(r.min_max_coefficient > 0.0);
    }
}
