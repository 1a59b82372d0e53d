//! Bochner-Martinelli potentials on spheres.
//!
//! The kernel is applied as a scalar density against surface measure:
//!
//! ```text
//! M u(z) = int_{|zeta| = R} (n-1)!/(2 pi i)^n sum_j (conj(zeta_j) - conj(z_j)) |zeta - z|^{-2n} kappa_j(zeta) u(zeta) ds
//! ```
//!
//! with `kappa_j(zeta) = c_n zeta_j / R` the density of
//! `(-1)^{j-1} dzb[j] ^ dz` against `ds`. The constant `c_n = 2^{n-1} i^n`
//! is the value for which `M 1(0) = 1`; [`calibrate_surface_constant`]
//! recomputes it from a quadrature rule.
//!
//! Targets closer to the sphere than `near_field` are integrated with a rule
//! graded toward the nearest surface point; targets closer than `delta_min`
//! are refused.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrals::sphere_integral;
use crate::kelvin::{KelvinFunction, NumericKelvin};
use crate::par::{self, CompensatedComplexSum, Execution};
use crate::quadrature::{unit_sphere_area, FocusOptions, Resolution, SphereQuadrature};
use crate::types::{exact_int, CPoint, ExactComplex};

fn factorial_f64(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `Phi_{2n}(x)`: `|x|^{2-2n} / ((2-2n) sigma_{2n})` for `n >= 2` and
/// `ln|x| / (2 pi)` for `n = 1`. `x` is a real vector of length `2n`.
pub fn fundamental_solution(x: &[f64]) -> Result<f64> {
    if x.is_empty() || !x.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("expected an even-length vector, got {}", x.len())));
    }
    let n = x.len() / 2;
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::SingularEvaluation);
    }
    if n == 1 {
        return Ok(r.ln() / (2.0 * PI));
    }
    let e = 2.0 - 2.0 * n as f64;
    Ok(r.powf(e) / (e * unit_sphere_area(n)))
}

/// `2^{n-1} i^n`.
pub fn surface_form_constant_exact(n: usize) -> ExactComplex {
    let i = exact_int(0, 1);
    let mut c = exact_int(1 << (n - 1), 0);
    for _ in 0..n {
        c *= i.clone();
    }
    c
}

pub fn surface_form_constant(n: usize) -> Complex64 {
    Complex64::new(0.0, 1.0).powu(n as u32) * 2f64.powi(n as i32 - 1)
}

/// `kappa_j(zeta) = c zeta_j / R` on the sphere of radius `R`.
pub fn surface_form_density(zeta: &CPoint, radius: f64, c: Complex64) -> Vec<Complex64> {
    zeta.coords().iter().map(|z| c * z / radius).collect()
}

fn kernel_prefactor(n: usize) -> Complex64 {
    factorial_f64(n - 1) / (Complex64::new(0.0, 2.0 * PI)).powu(n as u32)
}

/// `(n-1)!/(2 pi i)^n sum_j (conj(zeta_j) - conj(z_j)) |zeta - z|^{-2n} kappa_j`.
pub fn bm_kernel_density(z: &CPoint, zeta: &CPoint, kappa: &[Complex64]) -> Result<Complex64> {
    let n = z.dim();
    if zeta.dim() != n || kappa.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: zeta.dim().min(kappa.len()) });
    }
    let w = zeta.sub(z);
    let r2 = w.norm_sq();
    if r2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(kernel_density_unchecked(&w, r2, kappa, kernel_prefactor(n)))
}

#[inline]
fn kernel_density_unchecked(w: &CPoint, r2: f64, kappa: &[Complex64], prefactor: Complex64) -> Complex64 {
    let n = w.dim();
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..n {
        s += w[j].conj() * kappa[j];
    }
    prefactor * s / r2.powi(n as i32)
}

/// `d_j Phi_{2n}` as a Kelvin function of `w = zeta - z`, up to the numeric
/// factor returned alongside it.
fn phi_derivatives(n: usize) -> (Vec<NumericKelvin>, f64) {
    let sigma = unit_sphere_area(n);
    if n == 1 {
        // d_w (ln|w| / 2 pi) = conj(w) |w|^{-2} / (2 sigma_2).
        let f = KelvinFunction::zbar(1, 0).mul(&KelvinFunction::inverse_norm_power(1, 1));
        return (vec![f.compile()], 1.0 / (2.0 * sigma));
    }
    let phi = KelvinFunction::inverse_norm_power(n, n as u32 - 1);
    let c_phi = 1.0 / ((2.0 - 2.0 * n as f64) * sigma);
    let d = (0..n).map(|j| phi.dbar_star(j).expect("index in range").compile()).collect();
    (d, c_phi)
}

/// The same density through `4 / (2i)^n sum_j (d_j Phi_{2n})(zeta - z) kappa_j`,
/// with the derivative taken symbolically.
pub fn bm_kernel_density_via_phi(z: &CPoint, zeta: &CPoint, kappa: &[Complex64]) -> Result<Complex64> {
    let n = z.dim();
    if zeta.dim() != n || kappa.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: zeta.dim().min(kappa.len()) });
    }
    let w = zeta.sub(z);
    if w.norm_sq() == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let (d, c_phi) = phi_derivatives(n);
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..n {
        s += d[j].evaluate(&w)? * c_phi * kappa[j];
    }
    Ok(4.0 / Complex64::new(0.0, 2.0).powu(n as u32) * s)
}

/// Boundary data evaluable anywhere on the sphere.
pub trait BoundaryData: Sync {
    fn value(&self, zeta: &CPoint) -> Complex64;
}

impl BoundaryData for NumericKelvin {
    fn value(&self, zeta: &CPoint) -> Complex64 {
        self.evaluate(zeta).expect("boundary points avoid the origin")
    }
}

/// Boundary data given by a closure.
pub struct FnData<F>(pub F);

impl<F: Fn(&CPoint) -> Complex64 + Sync> BoundaryData for FnData<F> {
    fn value(&self, zeta: &CPoint) -> Complex64 {
        (self.0)(zeta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Interior,
    Exterior,
}

/// Which rule produced a [`BMEvaluation`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleUsed {
    Base,
    Focused,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BMEvaluation {
    pub z: CPoint,
    pub value: Complex64,
    pub side: Side,
    pub rule: RuleUsed,
    pub distance: f64,
}

/// Off-surface evaluator of `M u` on one sphere.
#[derive(Debug, Clone)]
pub struct BmEvaluator {
    quad: SphereQuadrature,
    /// Targets closer than this are refused.
    pub delta_min: f64,
    /// Targets closer than this use a focused rule (`n <= 2`).
    pub near_field: f64,
    pub focus: FocusOptions,
    pub surface_constant: Complex64,
    pub exec: Execution,
}

fn default_near_field(quad: &SphereQuadrature) -> f64 {
    let r = quad.radius();
    match quad.resolution() {
        Some(Resolution::Circle { points }) => 32.0 * r / points as f64,
        Some(Resolution::Hopf { phi1, phi2, .. }) => 32.0 * r / phi1.min(phi2) as f64,
        _ => 0.0,
    }
}

impl BmEvaluator {
    pub fn new(quad: SphereQuadrature) -> Self {
        let n = quad.dim();
        let near_field = default_near_field(&quad);
        BmEvaluator {
            delta_min: 0.05 * quad.radius(),
            near_field,
            focus: FocusOptions::default(),
            surface_constant: surface_form_constant(n),
            exec: Execution::default(),
            quad,
        }
    }

    pub fn with_resolution(n: usize, radius: f64, resolution: Resolution) -> Result<Self> {
        Ok(Self::new(SphereQuadrature::build(n, radius, resolution)?))
    }

    pub fn default_for(n: usize, radius: f64) -> Result<Self> {
        Ok(Self::new(SphereQuadrature::build_default(n, radius)?))
    }

    pub fn quadrature(&self) -> &SphereQuadrature {
        &self.quad
    }

    pub fn dim(&self) -> usize {
        self.quad.dim()
    }

    pub fn radius(&self) -> f64 {
        self.quad.radius()
    }

    /// `M u(z)`, refusing targets within `delta_min` of the sphere.
    pub fn evaluate(&self, data: &dyn BoundaryData, z: &CPoint) -> Result<BMEvaluation> {
        self.evaluate_with_floor(data, z, self.delta_min)
    }

    /// As [`evaluate`](Self::evaluate) with a custom refusal distance.
    pub fn evaluate_with_floor(&self, data: &dyn BoundaryData, z: &CPoint, floor: f64) -> Result<BMEvaluation> {
        let n = self.dim();
        if z.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: z.dim() });
        }
        if !z.is_finite() {
            return Err(Error::InvalidInput("non-finite target".into()));
        }
        let r = self.radius();
        let norm = z.norm();
        let distance = (norm - r).abs();
        if distance < floor {
            return Err(Error::TooCloseToSurface { distance, min: floor });
        }
        let side = if norm < r { Side::Interior } else { Side::Exterior };
        let (value, rule) = if distance < self.near_field && n <= 2 && norm > 0.0 {
            let focus = z.scale(r / norm);
            let rule = SphereQuadrature::focused(n, r, &focus, distance, self.focus)?;
            (self.integrate(&rule, data, z)?, RuleUsed::Focused)
        } else {
            (self.integrate(&self.quad, data, z)?, RuleUsed::Base)
        };
        Ok(BMEvaluation { z: z.clone(), value, side, rule, distance })
    }

    fn integrate(&self, rule: &SphereQuadrature, data: &dyn BoundaryData, z: &CPoint) -> Result<Complex64> {
        let pre = kernel_prefactor(self.dim());
        let r = rule.radius();
        let c = self.surface_constant;
        rule.integrate_with(self.exec, |zeta| {
            let w = zeta.sub(z);
            let kappa = surface_form_density(zeta, r, c);
            kernel_density_unchecked(&w, w.norm_sq(), &kappa, pre) * data.value(zeta)
        })
    }

    /// Evaluations at many targets, parallel across targets.
    pub fn evaluate_many(&self, data: &dyn BoundaryData, points: &[CPoint]) -> Vec<Result<BMEvaluation>> {
        let inner = BmEvaluator { exec: Execution::Sequential, ..self.clone() };
        par::map_slice(self.exec, points, |z| inner.evaluate(data, z))
    }
}

/// `M u(z)` from samples at the nodes of `quad`, with no near-field handling.
pub fn bm_integral_samples(
    samples: &[Complex64],
    quad: &SphereQuadrature,
    z: &CPoint,
    delta_min: f64,
) -> Result<BMEvaluation> {
    let n = quad.dim();
    if samples.len() != quad.len() {
        return Err(Error::DimensionMismatch { expected: quad.len(), found: samples.len() });
    }
    if z.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: z.dim() });
    }
    let r = quad.radius();
    let distance = (z.norm() - r).abs();
    if distance < delta_min {
        return Err(Error::TooCloseToSurface { distance, min: delta_min });
    }
    let pre = kernel_prefactor(n);
    let c = surface_form_constant(n);
    let mut acc = CompensatedComplexSum::new();
    for (i, (zeta, w)) in quad.nodes().iter().zip(quad.weights()).enumerate() {
        let d = zeta.sub(z);
        let kappa = surface_form_density(zeta, r, c);
        let t = kernel_density_unchecked(&d, d.norm_sq(), &kappa, pre) * samples[i] * *w;
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::NonFinite { node: i });
        }
        acc.add(t);
    }
    let side = if z.norm() < r { Side::Interior } else { Side::Exterior };
    Ok(BMEvaluation { z: z.clone(), value: acc.value(), side, rule: RuleUsed::Base, distance })
}

/// The constant `c` for which `M 1(z) = 1` at the interior point `z`, with
/// `kappa_j = c zeta_j / R` and `quad` as the rule.
pub fn calibrate_surface_constant(quad: &SphereQuadrature, z: &CPoint) -> Result<Complex64> {
    let n = quad.dim();
    if z.norm() >= quad.radius() {
        return Err(Error::InvalidInput("calibration point must be interior".into()));
    }
    let pre = kernel_prefactor(n);
    let r = quad.radius();
    let unit = Complex64::new(1.0, 0.0);
    let m = quad.integrate(|zeta| {
        let w = zeta.sub(z);
        kernel_density_unchecked(&w, w.norm_sq(), &surface_form_density(zeta, r, unit), pre)
    })?;
    Ok(unit / m)
}

/// Deterministic target points with `|z| / R` uniform in `[lo, hi]`.
pub fn sample_points(n: usize, radius: f64, lo: f64, hi: f64, count: usize, seed: u64) -> Vec<CPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let x: Vec<f64> = (0..2 * n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let t = radius * (lo + (hi - lo) * rng.random::<f64>());
            CPoint::from_real(&x.iter().map(|v| v * t / norm).collect::<Vec<_>>()).expect("even length")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrReport {
    pub max_abs: f64,
    pub argmax: usize,
    pub values: Vec<f64>,
}

/// `max |M u|` over exterior samples: small values indicate CR data.
pub fn cr_test(data: &dyn BoundaryData, ev: &BmEvaluator, exterior: &[CPoint]) -> Result<CrReport> {
    if exterior.is_empty() {
        return Err(Error::InvalidInput("no exterior samples".into()));
    }
    for z in exterior {
        if z.norm() < ev.radius() {
            return Err(Error::InvalidInput("cr_test sample lies inside the sphere".into()));
        }
    }
    let values = ev
        .evaluate_many(data, exterior)
        .into_iter()
        .map(|r| r.map(|e| e.value.norm()))
        .collect::<Result<Vec<f64>>>()?;
    let (argmax, max_abs) =
        values.iter().cloned().enumerate().fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(CrReport { max_abs, argmax, values })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpReport {
    pub offsets: Vec<f64>,
    pub interior: Vec<Complex64>,
    pub exterior: Vec<Complex64>,
    pub interior_limit: Complex64,
    pub exterior_limit: Complex64,
    pub jump: Complex64,
    /// False when the differences between successive offsets fail to shrink.
    pub monotone: bool,
}

/// Smallest offset accepted by [`jump_check`], as a fraction of `R`.
pub const JUMP_FLOOR: f64 = 0.01;

fn richardson(values: &[Complex64]) -> Complex64 {
    let a: Vec<Complex64> = values.windows(2).map(|w| 2.0 * w[1] - w[0]).collect();
    let b: Vec<Complex64> = a.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    *b.last().expect("at least three values")
}

fn shrinking(values: &[Complex64]) -> bool {
    let d: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    d.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + 1e-14)
}

/// `M^- u - M^+ u` at the surface point `zeta0`, extrapolated from targets
/// `zeta0 (1 -+ delta / R)` for halving offsets `delta`.
pub fn jump_check(data: &dyn BoundaryData, ev: &BmEvaluator, zeta0: &CPoint, offsets: &[f64]) -> Result<JumpReport> {
    let r = ev.radius();
    if (zeta0.norm() - r).abs() > 1e-9 * r {
        return Err(Error::NotOnSphere { norm: zeta0.norm(), radius: r });
    }
    if offsets.len() < 3 {
        return Err(Error::InvalidInput("need at least three offsets".into()));
    }
    for w in offsets.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(Error::InvalidInput("offsets must halve successively".into()));
        }
    }
    if offsets[0] >= 0.3 * r {
        return Err(Error::InvalidInput("largest offset must be below 0.3 R".into()));
    }
    let floor = JUMP_FLOOR * r;
    let mut interior = Vec::with_capacity(offsets.len());
    let mut exterior = Vec::with_capacity(offsets.len());
    for &d in offsets {
        interior.push(ev.evaluate_with_floor(data, &zeta0.scale(1.0 - d / r), floor)?.value);
        exterior.push(ev.evaluate_with_floor(data, &zeta0.scale(1.0 + d / r), floor)?.value);
    }
    let interior_limit = richardson(&interior);
    let exterior_limit = richardson(&exterior);
    let monotone = shrinking(&interior) && shrinking(&exterior);
    Ok(JumpReport {
        offsets: offsets.to_vec(),
        jump: interior_limit - exterior_limit,
        interior,
        exterior,
        interior_limit,
        exterior_limit,
        monotone,
    })
}

/// `sum_j (nu_j - i nu_{j+n}) dbar_j f` at `zeta`, with `nu = zeta / R`.
pub fn complex_normal_derivative(f: &KelvinFunction, zeta: &CPoint, radius: f64) -> Result<Complex64> {
    let n = f.dim();
    if zeta.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: zeta.dim() });
    }
    if (zeta.norm() - radius).abs() > 1e-9 * radius {
        return Err(Error::NotOnSphere { norm: zeta.norm(), radius });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        acc += zeta[j].conj() / radius * f.dbar(j)?.evaluate(zeta)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    pub value_max: Vec<f64>,
    pub gradient_max: Vec<f64>,
    /// Least-squares slope of `log max|v|` against `log |z|`.
    pub value_exponent: f64,
    pub gradient_exponent: f64,
    pub value_bound: f64,
    pub gradient_bound: f64,
    /// Exponents `k` of `R^k` in the exact sphere integral
    /// `int_{|z| = R} sum_j conj(dbar_j v) v kappa_j ds`.
    pub boundary_term_exponents: Vec<i64>,
    pub boundary_term_values: Vec<Complex64>,
    pub pass: bool,
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Decay exponents of `v` and `dbar v` on spheres `|z| in {10, 100, 1000}`
/// and the behaviour of the boundary term at infinity.
pub fn decay_check(v: &KelvinFunction) -> Result<DecayReport> {
    let n = v.dim();
    let radii = vec![10.0, 100.0, 1000.0];
    let dirs = sample_points(n, 1.0, 1.0, 1.0, 32, 0x5eed);
    let fv = v.compile();
    let grads: Vec<NumericKelvin> = (0..n).map(|j| v.dbar(j).map(|g| g.compile())).collect::<Result<_>>()?;
    let mut value_max = Vec::new();
    let mut gradient_max = Vec::new();
    for &r in &radii {
        let mut vm: f64 = 0.0;
        let mut gm: f64 = 0.0;
        for d in &dirs {
            let z = d.scale(r);
            vm = vm.max(fv.evaluate(&z)?.norm());
            let g2: f64 = grads.iter().map(|g| g.evaluate(&z).map(|x| x.norm_sqr())).sum::<Result<f64>>()?;
            gm = gm.max(g2.sqrt());
        }
        value_max.push(vm);
        gradient_max.push(gm);
    }
    let lx: Vec<f64> = radii.iter().map(|r: &f64| r.ln()).collect();
    let exponent = |ys: &[f64]| {
        if ys.iter().all(|&y| y == 0.0) {
            f64::NEG_INFINITY
        } else {
            slope(&lx, &ys.iter().map(|y| y.ln()).collect::<Vec<_>>())
        }
    };
    let value_exponent = exponent(&value_max);
    let gradient_exponent = exponent(&gradient_max);
    let value_bound = 2.0 - 2.0 * n as f64;
    let gradient_bound = 1.0 - 2.0 * n as f64;

    let c = surface_form_constant_exact(n);
    let mut integrand = KelvinFunction::zero(n);
    for j in 0..n {
        let t = v.dbar(j)?.conj().mul(v).mul(&KelvinFunction::z(n, j));
        integrand = integrand.add(&t);
    }
    let boundary = sphere_integral(&integrand.scale(&c)).shift(-1);
    let boundary_term_exponents: Vec<i64> = boundary.terms().map(|(k, _)| *k).collect();
    let boundary_term_values = radii.iter().map(|&r| boundary.to_complex(r)).collect();
    let pass = value_exponent <= value_bound + 0.1
        && gradient_exponent <= gradient_bound + 0.1
        && boundary_term_exponents.iter().all(|&k| k < 0);
    Ok(DecayReport {
        radii,
        value_max,
        gradient_max,
        value_exponent,
        gradient_exponent,
        value_bound,
        gradient_bound,
        boundary_term_exponents,
        boundary_term_values,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::MultiIndex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mono(p: &[u32]) -> NumericKelvin {
        KelvinFunction::holomorphic_monomial(MultiIndex::new(p.to_vec())).compile()
    }

    #[test]
    fn fundamental_solution_examples() {
        let v = fundamental_solution(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((v + 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
        let v = fundamental_solution(&[0.0, 2.0, 0.0, 0.0]).unwrap();
        assert!((v + 1.0 / (16.0 * PI * PI)).abs() < 1e-15);
        assert_eq!(fundamental_solution(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(fundamental_solution(&[0.0, 0.0]), Err(Error::SingularEvaluation));
    }

    #[test]
    fn surface_constant_values() {
        assert_eq!(surface_form_constant(1), c(0.0, 1.0));
        assert_eq!(surface_form_constant(2), c(-2.0, 0.0));
        assert_eq!(surface_form_constant(3), c(0.0, -4.0));
        assert_eq!(surface_form_constant_exact(2), exact_int(-2, 0));
    }

    #[test]
    fn one_dimensional_kernel_is_cauchy() {
        // kappa ds = dzeta on |zeta| = R.
        let z = CPoint::new(vec![c(0.2, -0.1)]);
        let zeta = CPoint::new(vec![Complex64::from_polar(1.0, 0.7)]);
        let kappa = surface_form_density(&zeta, 1.0, surface_form_constant(1));
        let dzeta_ds = c(0.0, 1.0) * zeta[0];
        assert!((kappa[0] - dzeta_ds).norm() < 1e-15);
        let density = bm_kernel_density(&z, &zeta, &kappa).unwrap();
        let cauchy = dzeta_ds / (c(0.0, 2.0 * PI) * (zeta[0] - z[0]));
        assert!((density - cauchy).norm() < 1e-14);
    }

    #[test]
    fn presentations_agree() {
        for n in 1..=3 {
            let pts = sample_points(n, 1.0, 0.0, 2.0, 20, 11 + n as u64);
            let surf = sample_points(n, 1.0, 1.0, 1.0, 20, 99 + n as u64);
            for (z, zeta) in pts.iter().zip(&surf) {
                let kappa = surface_form_density(zeta, 1.0, surface_form_constant(n));
                let a = bm_kernel_density(z, zeta, &kappa).unwrap();
                let b = bm_kernel_density_via_phi(z, zeta, &kappa).unwrap();
                assert!((a - b).norm() <= 1e-12 * a.norm(), "n={n}");
            }
        }
        let z = CPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(bm_kernel_density(&z, &z, &[c(1.0, 0.0); 2]), Err(Error::CoincidentPoints));
    }

    #[test]
    fn calibration_recovers_constant() {
        for n in 1..=2 {
            let quad = SphereQuadrature::build_default(n, 1.0).unwrap();
            let cn = calibrate_surface_constant(&quad, &CPoint::origin(n)).unwrap();
            assert!((cn - surface_form_constant(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn reproduction_examples() {
        let ev = BmEvaluator::default_for(2, 1.0).unwrap();
        let one = KelvinFunction::one(2).compile();
        let e = ev.evaluate(&one, &CPoint::origin(2)).unwrap();
        assert!((e.value - c(1.0, 0.0)).norm() < 1e-6);
        assert_eq!(e.side, Side::Interior);
        let z = CPoint::new(vec![c(0.3, 0.0), c(0.1, 0.2)]);
        let e = ev.evaluate(&mono(&[1, 1]), &z).unwrap();
        assert!((e.value - c(0.03, 0.06)).norm() < 1e-6);
        let e = ev.evaluate(&mono(&[2, 0]), &CPoint::new(vec![c(2.0, 0.0), c(0.0, 0.0)])).unwrap();
        assert!(e.value.norm() < 1e-6);
        assert_eq!(e.side, Side::Exterior);
    }

    #[test]
    fn near_field_reproduction() {
        let ev = BmEvaluator::default_for(2, 1.0).unwrap();
        let data = mono(&[2, 1]);
        for (t, phase) in [(0.95, 0.3), (0.93, -1.0), (1.05, 2.0), (1.06, 0.9), (1.2, 0.1), (0.6, 1.4), (0.45, 0.2)] {
            let dir = CPoint::new(vec![Complex64::from_polar(0.6, phase), Complex64::from_polar(0.8, 0.5)]);
            let z = dir.scale(t);
            let e = ev.evaluate(&data, &z).unwrap();
            let expect = if t < 1.0 { data.evaluate(&z).unwrap() } else { c(0.0, 0.0) };
            assert!((e.value - expect).norm() < 1e-6, "t={t}: {} vs {}", e.value, expect);
        }
        let z = CPoint::new(vec![c(0.98, 0.0), c(0.0, 0.0)]);
        assert!(matches!(ev.evaluate(&data, &z), Err(Error::TooCloseToSurface { .. })));
    }

    #[test]
    fn circle_reproduction_and_residue() {
        let ev = BmEvaluator::default_for(1, 1.0).unwrap();
        let z = CPoint::new(vec![c(0.5, 0.3)]);
        let e = ev.evaluate(&mono(&[3]), &z).unwrap();
        assert!((e.value - z[0].powu(3)).norm() < 1e-10);
        let z = CPoint::new(vec![c(0.0, 0.93)]);
        let e = ev.evaluate(&mono(&[2]), &z).unwrap();
        assert_eq!(e.rule, RuleUsed::Focused);
        assert!((e.value - z[0].powu(2)).norm() < 1e-8);
    }

    #[test]
    fn samples_path_matches_evaluator() {
        let quad = SphereQuadrature::build_default(2, 1.0).unwrap();
        let data = mono(&[1, 1]);
        let samples: Vec<Complex64> = quad.nodes().iter().map(|z| data.evaluate(z).unwrap()).collect();
        let z = CPoint::new(vec![c(0.1, 0.0), c(0.0, 0.2)]);
        let e = bm_integral_samples(&samples, &quad, &z, 0.05).unwrap();
        assert!((e.value - data.evaluate(&z).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn cr_examples() {
        let ev = BmEvaluator::default_for(2, 1.0).unwrap();
        let pts = sample_points(2, 1.0, 1.1, 2.0, 6, 5);
        let holo = cr_test(&mono(&[2, 1]), &ev, &pts).unwrap();
        assert!(holo.max_abs < 1e-6);
        let anti = KelvinFunction::zbar(2, 0).compile();
        let r = cr_test(&anti, &ev, &pts).unwrap();
        assert!(r.max_abs > 0.01);
        let zero = KelvinFunction::zero(2).compile();
        assert_eq!(cr_test(&zero, &ev, &pts).unwrap().max_abs, 0.0);
    }

    #[test]
    fn jump_examples() {
        let ev = BmEvaluator::default_for(2, 1.0).unwrap();
        let offsets = [0.2, 0.1, 0.05, 0.025];
        let zeta0 = CPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let one = KelvinFunction::one(2).compile();
        let j = jump_check(&one, &ev, &zeta0, &offsets).unwrap();
        assert!((j.jump - c(1.0, 0.0)).norm() < 1e-3);
        let j = jump_check(&mono(&[1, 0]), &ev, &zeta0, &offsets).unwrap();
        assert!((j.jump - c(1.0, 0.0)).norm() < 1e-2);
        let zero = KelvinFunction::zero(2).compile();
        assert_eq!(jump_check(&zero, &ev, &zeta0, &offsets).unwrap().jump, c(0.0, 0.0));
        let off = CPoint::new(vec![c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(jump_check(&one, &ev, &off, &offsets).is_err());
    }

    #[test]
    fn complex_normal_derivative_examples() {
        let zeta = CPoint::new(vec![Complex64::from_polar(0.6, 0.4), Complex64::from_polar(0.8, -0.3)]);
        let v = complex_normal_derivative(&KelvinFunction::norm_sq_poly(2), &zeta, 1.0).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-14);
        let h = KelvinFunction::holomorphic_monomial(MultiIndex::new(vec![2, 1]));
        assert_eq!(complex_normal_derivative(&h, &zeta, 1.0).unwrap(), c(0.0, 0.0));
        let e1 = CPoint::new(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let v = complex_normal_derivative(&KelvinFunction::zbar(2, 0), &e1, 1.0).unwrap();
        assert_eq!(v, c(1.0, 0.0));
        assert!(complex_normal_derivative(&h, &e1.scale(0.5), 1.0).is_err());
    }

    #[test]
    fn decay_examples() {
        let r = decay_check(&KelvinFunction::inverse_norm_power(2, 1)).unwrap();
        assert!((r.value_exponent + 2.0).abs() < 1e-9);
        assert!((r.gradient_exponent + 3.0).abs() < 1e-9);
        assert_eq!(r.boundary_term_exponents, vec![-2]);
        assert!(r.pass);
        let v = KelvinFunction::z(2, 0).mul(&KelvinFunction::inverse_norm_power(2, 2));
        let r = decay_check(&v).unwrap();
        assert!((r.value_exponent + 3.0).abs() < 1e-9);
        assert!(r.pass);
    }
}
