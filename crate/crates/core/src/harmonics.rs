//! Harmonic homogeneous polynomials in `R^{2n}`, their Kelvin extensions,
//! Dirichlet problems on balls, the Hermitian form `h_D` and the truncated
//! holomorphic projection.
//!
//! A basis of degree `r` is the exact null space of the Laplacian on
//! `(z, zb)` monomials of each bidegree `(a, b)`, `a + b = r`, made
//! orthogonal on the unit sphere by exact Gram-Schmidt. Different bidegrees
//! are orthogonal automatically. Norms stay symbolic (`norms_sq`), so no
//! square roots enter.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrals::{ball_integral, exterior_integral, sphere_inner, PiMultiple, RadialValue};
use crate::kelvin::KelvinFunction;
use crate::linalg::{integer_nullspace, solve_hermitian};
use crate::par::{self, Execution};
use crate::types::{exact_real, factorial, rational_pow, rational_to_f64, ExactComplex, ExactRational, MultiIndex};

/// `J(r, 2n)`, the dimension of the space of degree-`r` spherical harmonics
/// in `R^{2n}`.
pub fn dimension_formula(r: u32, n: usize) -> u64 {
    assert!(n >= 1, "dimension must be >= 1");
    if n == 1 {
        return if r == 0 { 1 } else { 2 };
    }
    let (r, n) = (r as u64, n as u64);
    let num = BigInt::from(2 * n + 2 * r - 2) * factorial(r + 2 * n - 3);
    let den = factorial(r) * factorial(2 * n - 2);
    let q = num / den;
    u64::try_from(q).expect("dimension fits in u64")
}

/// Orthogonal basis of harmonic homogeneous polynomials of one degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicBasis {
    pub degree: u32,
    pub n: usize,
    pub polys: Vec<KelvinFunction>,
    /// `(1 / pi^n) int_{S_1} |h|^2 ds` for each member.
    #[serde(skip)]
    pub norms_sq: Vec<ExactRational>,
    /// `(a, b)`: every member is a combination of `z^p zb^q` with `|p| = a`, `|q| = b`.
    pub bidegrees: Vec<(u32, u32)>,
}

fn bidegree_kernel(n: usize, a: u32, b: u32) -> Vec<KelvinFunction> {
    let ps = MultiIndex::all_of_order(n, a);
    let qs = MultiIndex::all_of_order(n, b);
    let cols: Vec<(MultiIndex, MultiIndex)> =
        ps.iter().flat_map(|p| qs.iter().map(move |q| (p.clone(), q.clone()))).collect();
    let rows: Vec<Vec<BigInt>> = if a == 0 || b == 0 {
        Vec::new()
    } else {
        let tp = MultiIndex::all_of_order(n, a - 1);
        let tq = MultiIndex::all_of_order(n, b - 1);
        let targets: Vec<(MultiIndex, MultiIndex)> =
            tp.iter().flat_map(|p| tq.iter().map(move |q| (p.clone(), q.clone()))).collect();
        let mut m = vec![vec![BigInt::zero(); cols.len()]; targets.len()];
        for (c, (p, q)) in cols.iter().enumerate() {
            for j in 0..n {
                if let (Some(pp), Some(qq)) = (p.minus_unit(j), q.minus_unit(j)) {
                    let r = targets.binary_search(&(pp, qq)).expect("target monomial present");
                    m[r][c] += BigInt::from(p[j] as i64 * q[j] as i64);
                }
            }
        }
        m
    };
    integer_nullspace(&rows, cols.len())
        .into_iter()
        .map(|v| {
            let mut f = KelvinFunction::zero(n);
            for (c, (p, q)) in v.iter().zip(&cols) {
                if !c.is_zero() {
                    let coeff = exact_real(BigRational::from_integer(c.clone()));
                    f = f.add(&KelvinFunction::term(n, coeff, p.clone(), q.clone(), 0));
                }
            }
            f
        })
        .collect()
}

fn unit_inner(f: &KelvinFunction, g: &KelvinFunction) -> ExactComplex {
    sphere_inner(f, g, &BigRational::one())
}

impl HarmonicBasis {
    pub fn build(r: u32, n: usize) -> Self {
        assert!(n >= 1, "dimension must be >= 1");
        let mut polys = Vec::new();
        let mut norms_sq = Vec::new();
        let mut bidegrees = Vec::new();
        for a in (0..=r).rev() {
            let b = r - a;
            let mut ortho: Vec<(KelvinFunction, ExactComplex)> = Vec::new();
            for v in bidegree_kernel(n, a, b) {
                let mut u = v.clone();
                for (w, nw) in &ortho {
                    let c = unit_inner(&v, w) / nw.clone();
                    u = u.sub(&w.scale(&c));
                }
                let nu = unit_inner(&u, &u);
                ortho.push((u, nu));
            }
            for (u, nu) in ortho {
                polys.push(u);
                norms_sq.push(nu.re);
                bidegrees.push((a, b));
            }
        }
        HarmonicBasis { degree: r, n, polys, norms_sq, bidegrees }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// Exact Gram matrix `(1 / pi^n) int_{S_1} h_i conj(h_j) ds`.
    pub fn gram(&self) -> Vec<Vec<ExactComplex>> {
        self.polys.iter().map(|f| self.polys.iter().map(|g| unit_inner(f, g)).collect()).collect()
    }

    /// Gram matrix of the normalized members `h_i / |h_i|`, in floating point.
    pub fn normalized_gram(&self) -> Vec<Vec<f64>> {
        let g = self.gram();
        let norms: Vec<f64> = self.norms_sq.iter().map(|x| rational_to_f64(x).sqrt()).collect();
        g.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter().enumerate().map(|(j, v)| rational_to_f64(&v.re) / (norms[i] * norms[j])).collect()
            })
            .collect()
    }

    pub fn all_harmonic(&self) -> bool {
        self.polys.iter().all(KelvinFunction::is_harmonic)
    }
}

/// Bases for every degree `0..=r_max` in one dimension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicFamily {
    pub n: usize,
    pub r_max: u32,
    pub bases: Vec<HarmonicBasis>,
}

impl HarmonicFamily {
    pub fn build(n: usize, r_max: u32) -> Self {
        Self::build_with(n, r_max, Execution::default())
    }

    pub fn build_with(n: usize, r_max: u32, exec: Execution) -> Self {
        let bases = par::map_indexed(exec, r_max as usize + 1, |r| HarmonicBasis::build(r as u32, n));
        HarmonicFamily { n, r_max, bases }
    }

    pub fn basis(&self, r: u32) -> Option<&HarmonicBasis> {
        self.bases.get(r as usize)
    }
}

fn check_homogeneous_harmonic(h: &KelvinFunction) -> Result<u32> {
    if !h.is_polynomial() {
        return Err(Error::InvalidInput("expected a polynomial (all m = 0)".into()));
    }
    let mut degrees = h.terms().map(|(k, _)| k.p.order() + k.q.order());
    let r = degrees.next().unwrap_or(0);
    if degrees.any(|d| d != r) {
        return Err(Error::Inhomogeneous);
    }
    if !h.is_harmonic() {
        return Err(Error::NotHarmonic);
    }
    Ok(r)
}

/// `h |z|^{-(2n + 2r - 2)}` for a harmonic polynomial `h` homogeneous of degree `r`.
pub fn kelvin_extend(h: &KelvinFunction) -> Result<KelvinFunction> {
    let r = check_homogeneous_harmonic(h)?;
    let m = h.dim() as u32 + r - 1;
    Ok(h.mul(&KelvinFunction::inverse_norm_power(h.dim(), m)))
}

/// Boundary data on `|z| = R` expanded in a [`HarmonicFamily`].
#[derive(Debug, Clone)]
pub struct BoundaryExpansion {
    family: Arc<HarmonicFamily>,
    radius: ExactRational,
    /// `coefficients[r][j]` multiplies `bases[r].polys[j]`.
    pub coefficients: Vec<Vec<ExactComplex>>,
    /// `(1 / pi^n) int_{S_R} |data - expansion|^2 ds`; zero iff the data lies
    /// inside the truncation.
    pub residual_norm_sq: ExactRational,
}

impl BoundaryExpansion {
    /// Expands the trace of `f` on `|z| = radius`.
    pub fn from_trace(f: &KelvinFunction, radius: &ExactRational, family: Arc<HarmonicFamily>) -> Result<Self> {
        if f.dim() != family.n {
            return Err(Error::DimensionMismatch { expected: family.n, found: f.dim() });
        }
        if *radius <= BigRational::zero() {
            return Err(Error::InvalidInput("radius must be positive".into()));
        }
        let trace = f.trace_on_sphere(radius);
        let mut coefficients = Vec::with_capacity(family.bases.len());
        let mut recon = KelvinFunction::zero(f.dim());
        for basis in &family.bases {
            let row: Vec<ExactComplex> =
                basis.polys.iter().map(|h| sphere_inner(&trace, h, radius) / sphere_inner(h, h, radius)).collect();
            for (c, h) in row.iter().zip(&basis.polys) {
                recon = recon.add(&h.scale(c));
            }
            coefficients.push(row);
        }
        let residual = trace.sub(&recon);
        let residual_norm_sq = sphere_inner(&residual, &residual, radius).re;
        Ok(BoundaryExpansion { family, radius: radius.clone(), coefficients, residual_norm_sq })
    }

    /// Like [`from_trace`](Self::from_trace) but fails unless the data lies
    /// inside the truncation.
    pub fn from_trace_exact(f: &KelvinFunction, radius: &ExactRational, family: Arc<HarmonicFamily>) -> Result<Self> {
        let e = Self::from_trace(f, radius, family)?;
        if !e.is_exact() {
            return Err(Error::InvalidInput(format!(
                "boundary data exceeds the harmonic truncation r_max = {}",
                e.family.r_max
            )));
        }
        Ok(e)
    }

    pub fn is_exact(&self) -> bool {
        self.residual_norm_sq.is_zero()
    }

    pub fn radius(&self) -> &ExactRational {
        &self.radius
    }

    pub fn family(&self) -> &HarmonicFamily {
        &self.family
    }

    /// Harmonic polynomial in the ball with this boundary trace.
    pub fn dirichlet_interior(&self) -> KelvinFunction {
        let mut out = KelvinFunction::zero(self.family.n);
        for (basis, row) in self.family.bases.iter().zip(&self.coefficients) {
            for (c, h) in row.iter().zip(&basis.polys) {
                out = out.add(&h.scale(c));
            }
        }
        out
    }

    /// Harmonic function outside the ball, vanishing at infinity, with this
    /// boundary trace.
    pub fn dirichlet_exterior(&self) -> KelvinFunction {
        let n = self.family.n;
        let mut out = KelvinFunction::zero(n);
        for (basis, row) in self.family.bases.iter().zip(&self.coefficients) {
            let k = 2 * n as i64 + 2 * basis.degree as i64 - 2;
            let scale = exact_real(rational_pow(&self.radius, k));
            let m = n as u32 + basis.degree - 1;
            let kernel = KelvinFunction::inverse_norm_power(n, m);
            for (c, h) in row.iter().zip(&basis.polys) {
                if !c.is_zero() {
                    out = out.add(&h.mul(&kernel).scale(&(c.clone() * scale.clone())));
                }
            }
        }
        out
    }
}

/// Interior and exterior parts of `h_D(w, w~)`, each an exact multiple of `pi^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianFormValue {
    pub interior: PiMultiple,
    pub exterior: PiMultiple,
    pub total: PiMultiple,
}

impl HermitianFormValue {
    pub fn interior_f64(&self) -> f64 {
        self.interior.to_complex().re
    }

    pub fn exterior_f64(&self) -> f64 {
        self.exterior.to_complex().re
    }
}

/// `dbar` components of `w` inside the ball and of its exterior Dirichlet
/// extension, prepared once for repeated form evaluations.
#[derive(Debug, Clone)]
pub struct FormOperand {
    interior: Vec<KelvinFunction>,
    exterior: Vec<KelvinFunction>,
}

/// The Hermitian form `h_D` and projection `Pi_D` on `D = B(0, R)`,
/// truncated to harmonic degree `r_max`.
#[derive(Debug, Clone)]
pub struct BallForm {
    family: Arc<HarmonicFamily>,
    radius: ExactRational,
    /// Holomorphic monomials `z^s` with `|s| <= projection_degree` span the
    /// target of [`project_holomorphic`](Self::project_holomorphic).
    pub projection_degree: u32,
    pub condition_threshold: f64,
    pub exec: Execution,
}

/// Result of [`BallForm::project_holomorphic`].
#[derive(Debug, Clone)]
pub struct Projection {
    pub function: KelvinFunction,
    pub condition_estimate: f64,
}

fn pair_integral(
    a: &[KelvinFunction],
    b: &[KelvinFunction],
    integral: fn(&KelvinFunction) -> Result<RadialValue>,
    radius: &ExactRational,
    n: u32,
) -> Result<PiMultiple> {
    let mut acc = PiMultiple::zero(n);
    for (x, y) in a.iter().zip(b) {
        if x.is_empty() || y.is_empty() {
            continue;
        }
        acc = acc.add(&integral(&x.conj().mul(y))?.at(radius));
    }
    Ok(acc)
}

impl BallForm {
    pub fn new(family: Arc<HarmonicFamily>, radius: ExactRational) -> Result<Self> {
        if radius <= BigRational::zero() {
            return Err(Error::InvalidInput("radius must be positive".into()));
        }
        let projection_degree = family.r_max;
        Ok(BallForm { family, radius, projection_degree, condition_threshold: 1e12, exec: Execution::default() })
    }

    pub fn with_degree(n: usize, r_max: u32, radius: ExactRational) -> Result<Self> {
        Self::new(Arc::new(HarmonicFamily::build(n, r_max)), radius)
    }

    pub fn radius(&self) -> &ExactRational {
        &self.radius
    }

    pub fn family(&self) -> &Arc<HarmonicFamily> {
        &self.family
    }

    pub fn operand(&self, w: &KelvinFunction) -> Result<FormOperand> {
        let ext = BoundaryExpansion::from_trace_exact(w, &self.radius, self.family.clone())?.dirichlet_exterior();
        let n = w.dim();
        let grad = |f: &KelvinFunction| -> Vec<KelvinFunction> {
            (0..n).map(|j| f.dbar(j).expect("index in range")).collect()
        };
        Ok(FormOperand { interior: grad(w), exterior: grad(&ext) })
    }

    pub fn evaluate(&self, a: &FormOperand, b: &FormOperand) -> Result<HermitianFormValue> {
        let n = self.family.n as u32;
        let interior = pair_integral(&a.interior, &b.interior, ball_integral, &self.radius, n)?;
        let exterior = pair_integral(&a.exterior, &b.exterior, exterior_integral, &self.radius, n)?;
        let total = interior.add(&exterior);
        Ok(HermitianFormValue { interior, exterior, total })
    }

    /// `h_D(w, w~)`, conjugate-linear in `w` and linear in `w~`.
    pub fn value(&self, w: &KelvinFunction, w_tilde: &KelvinFunction) -> Result<HermitianFormValue> {
        self.evaluate(&self.operand(w)?, &self.operand(w_tilde)?)
    }

    /// Orthogonal projection onto `span{z^s : |s| <= r_max}` with respect to `h_D`.
    pub fn project_holomorphic(&self, w: &KelvinFunction) -> Result<Projection> {
        let n = self.family.n;
        if n == 1 {
            return Err(Error::Unsupported("h_D vanishes on constants when n = 1".into()));
        }
        let monomials = MultiIndex::all_up_to(n, self.projection_degree.min(self.family.r_max));
        let ops =
            par::map_slice(self.exec, &monomials, |s| self.operand(&KelvinFunction::holomorphic_monomial(s.clone())))
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
        let target = self.operand(w)?;
        let rows = par::map_indexed(self.exec, ops.len(), |i| -> Result<(Vec<ExactComplex>, ExactComplex)> {
            let row = ops.iter().map(|o| Ok(self.evaluate(&ops[i], o)?.total.coeff)).collect::<Result<Vec<_>>>()?;
            Ok((row, self.evaluate(&ops[i], &target)?.total.coeff))
        });
        let mut gram = Vec::with_capacity(rows.len());
        let mut rhs = Vec::with_capacity(rows.len());
        for r in rows {
            let (row, b) = r?;
            gram.push(row);
            rhs.push(b);
        }
        let solved = solve_hermitian(&gram, &rhs)?;
        if solved.condition_estimate > self.condition_threshold {
            return Err(Error::IllConditioned {
                condition: solved.condition_estimate,
                threshold: self.condition_threshold,
            });
        }
        let mut function = KelvinFunction::zero(n);
        for (c, s) in solved.solution.iter().zip(&monomials) {
            if !c.is_zero() {
                function = function.add(&KelvinFunction::holomorphic_monomial(s.clone()).scale(c));
            }
        }
        Ok(Projection { function, condition_estimate: solved.condition_estimate })
    }
}

/// Highest total degree `|p| + |q|` among the terms of a polynomial.
pub fn polynomial_degree(f: &KelvinFunction) -> u32 {
    f.terms().map(|(k, _)| k.p.order() + k.q.order()).max().unwrap_or(0)
}

/// `h_D(w, w~)` on `B(0, R)` with the truncation sized to the arguments.
pub fn hermitian_form(
    w: &KelvinFunction,
    w_tilde: &KelvinFunction,
    radius: &ExactRational,
) -> Result<HermitianFormValue> {
    if w.dim() != w_tilde.dim() {
        return Err(Error::DimensionMismatch { expected: w.dim(), found: w_tilde.dim() });
    }
    let r_max = polynomial_degree(w).max(polynomial_degree(w_tilde));
    BallForm::with_degree(w.dim(), r_max, radius.clone())?.value(w, w_tilde)
}

/// `Pi_D w` on `B(0, R)` over holomorphic monomials of degree `<= r_max`.
pub fn project_holomorphic(w: &KelvinFunction, r_max: u32, radius: &ExactRational) -> Result<KelvinFunction> {
    let mut form = BallForm::with_degree(w.dim(), r_max.max(polynomial_degree(w)), radius.clone())?;
    form.projection_degree = r_max;
    Ok(form.project_holomorphic(w)?.function)
}
