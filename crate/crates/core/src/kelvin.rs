//! Exact symbolic algebra of finite sums `c z^p conj(z)^q |z|^{-2m}`.
//!
//! The class is closed under both Wirtinger derivative families:
//!
//! ```text
//! dbar_j (c z^p zb^q |z|^{-2m}) = c q_j z^p zb^{q-e_j} |z|^{-2m} - c m z^{p+e_j} zb^q |z|^{-2m-2}
//! d_j    (c z^p zb^q |z|^{-2m}) = c p_j z^{p-e_j} zb^q |z|^{-2m} - c m z^p zb^{q+e_j} |z|^{-2m-2}
//! ```
//!
//! Representations are not unique because `|z|^2 = sum_j z_j zb_j`. Zero
//! testing clears the common denominator `|z|^{2M}` and compares the
//! resulting polynomial in `(z, zb)` coefficient by coefficient, which is
//! exact.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{
    exact, exact_int, exact_real, exact_to_complex, format_rational, parse_rational, rational, rational_pow, CPoint,
    ExactComplex, ExactRational, MultiIndex,
};

/// Key of a single term: holomorphic exponents, antiholomorphic exponents and
/// the power `m` of `|z|^{-2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub p: MultiIndex,
    pub q: MultiIndex,
    pub m: u32,
}

impl TermKey {
    /// Degree of positive homogeneity `|p| + |q| - 2m`.
    pub fn degree(&self) -> i64 {
        self.p.order() as i64 + self.q.order() as i64 - 2 * self.m as i64
    }
}

/// One stored term `coeff * z^p zb^q |z|^{-2m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct KelvinTerm {
    pub coeff: ExactComplex,
    pub key: TermKey,
}

/// Finite sum of Kelvin terms in `n` complex variables.
#[derive(Debug, Clone, PartialEq)]
pub struct KelvinFunction {
    n: usize,
    terms: BTreeMap<TermKey, ExactComplex>,
}

/// Result of [`KelvinFunction::euler_degree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EulerDegree {
    Homogeneous(i64),
    Inhomogeneous,
}

type Poly = BTreeMap<(MultiIndex, MultiIndex), ExactComplex>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for ((p1, q1), c1) in a {
        for ((p2, q2), c2) in b {
            let key = (p1 + p2, q1 + q2);
            let entry = out.entry(key).or_insert_with(ExactComplex::zero);
            *entry = entry.clone() + c1.clone() * c2.clone();
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl KelvinFunction {
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "dimension must be >= 1");
        KelvinFunction { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: ExactComplex) -> Self {
        Self::term(n, c, MultiIndex::zeros(n), MultiIndex::zeros(n), 0)
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, ExactComplex::one())
    }

    pub fn term(n: usize, coeff: ExactComplex, p: MultiIndex, q: MultiIndex, m: u32) -> Self {
        assert_eq!(p.dim(), n, "holomorphic exponent has wrong dimension");
        assert_eq!(q.dim(), n, "antiholomorphic exponent has wrong dimension");
        let mut f = Self::zero(n);
        f.add_term(coeff, TermKey { p, q, m });
        f
    }

    /// `z^p zb^q`.
    pub fn monomial(p: MultiIndex, q: MultiIndex) -> Self {
        let n = p.dim();
        Self::term(n, ExactComplex::one(), p, q, 0)
    }

    /// `z^p`.
    pub fn holomorphic_monomial(p: MultiIndex) -> Self {
        let n = p.dim();
        Self::monomial(p, MultiIndex::zeros(n))
    }

    /// `z_j` (0-based `j`).
    pub fn z(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, j), MultiIndex::zeros(n))
    }

    /// `conj(z_j)` (0-based `j`).
    pub fn zbar(n: usize, j: usize) -> Self {
        Self::monomial(MultiIndex::zeros(n), MultiIndex::unit(n, j))
    }

    /// `|z|^{-2m}`.
    pub fn inverse_norm_power(n: usize, m: u32) -> Self {
        Self::term(n, ExactComplex::one(), MultiIndex::zeros(n), MultiIndex::zeros(n), m)
    }

    /// `|z|^{2k}` expanded as a polynomial `(sum_j z_j zb_j)^k`.
    pub fn norm_sq_power(n: usize, k: u32) -> Self {
        let mut acc = Self::one(n);
        let base = Self::norm_sq_poly(n);
        for _ in 0..k {
            acc = acc.mul(&base);
        }
        acc
    }

    /// `sum_j z_j zb_j`.
    pub fn norm_sq_poly(n: usize) -> Self {
        let mut f = Self::zero(n);
        for j in 0..n {
            f.add_term(ExactComplex::one(), TermKey { p: MultiIndex::unit(n, j), q: MultiIndex::unit(n, j), m: 0 });
        }
        f
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = KelvinTerm>) -> Result<Self> {
        let mut f = Self::zero(n);
        for t in terms {
            if t.key.p.dim() != n || t.key.q.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.key.p.dim().max(t.key.q.dim()) });
            }
            f.add_term(t.coeff, t.key);
        }
        Ok(f)
    }

    fn add_term(&mut self, coeff: ExactComplex, key: TermKey) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c = c.clone() + coeff;
                if c.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &ExactComplex)> {
        self.terms.iter()
    }

    pub fn term_list(&self) -> Vec<KelvinTerm> {
        self.terms.iter().map(|(k, c)| KelvinTerm { coeff: c.clone(), key: k.clone() }).collect()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// True when no terms are stored. Use [`is_zero`](Self::is_zero) for the
    /// mathematical zero test.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_m(&self) -> u32 {
        self.terms.keys().map(|k| k.m).max().unwrap_or(0)
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|k| k.m == 0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in add");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(c.clone(), k.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&exact_int(-1, 0))
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        let mut out = Self::zero(self.n);
        for (k, v) in &self.terms {
            out.add_term(v.clone() * c.clone(), k.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch in mul");
        let mut out = Self::zero(self.n);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.add_term(c1.clone() * c2.clone(), TermKey { p: &k1.p + &k2.p, q: &k1.q + &k2.q, m: k1.m + k2.m });
            }
        }
        out
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            out.add_term(c.conj(), TermKey { p: k.q.clone(), q: k.p.clone(), m: k.m });
        }
        out
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.n {
            Err(Error::IndexOutOfRange { index: j, dim: self.n })
        } else {
            Ok(())
        }
    }

    /// Cauchy-Riemann derivative `dbar_j = (d/dx_j + i d/dx_{j+n}) / 2` (0-based `j`).
    pub fn dbar(&self, j: usize) -> Result<Self> {
        self.check_index(j)?;
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            if let Some(q) = k.q.minus_unit(j) {
                let qj = exact_int(k.q[j] as i64, 0);
                out.add_term(c.clone() * qj, TermKey { p: k.p.clone(), q, m: k.m });
            }
            if k.m > 0 {
                let mm = exact_int(-(k.m as i64), 0);
                out.add_term(c.clone() * mm, TermKey { p: k.p.plus_unit(j), q: k.q.clone(), m: k.m + 1 });
            }
        }
        Ok(out)
    }

    /// Holomorphic Wirtinger derivative `d_j = (d/dx_j - i d/dx_{j+n}) / 2`,
    /// the components of the formal adjoint of `dbar`.
    pub fn dbar_star(&self, j: usize) -> Result<Self> {
        self.check_index(j)?;
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            if let Some(p) = k.p.minus_unit(j) {
                let pj = exact_int(k.p[j] as i64, 0);
                out.add_term(c.clone() * pj, TermKey { p, q: k.q.clone(), m: k.m });
            }
            if k.m > 0 {
                let mm = exact_int(-(k.m as i64), 0);
                out.add_term(c.clone() * mm, TermKey { p: k.p.clone(), q: k.q.plus_unit(j), m: k.m + 1 });
            }
        }
        Ok(out)
    }

    /// The full vector `(dbar_1 f, .., dbar_n f)`.
    pub fn dbar_vector(&self) -> KelvinVector {
        KelvinVector { components: (0..self.n).map(|j| self.dbar(j).expect("index in range").canonical()).collect() }
    }

    /// Laplacian in R^{2n}, computed as `4 sum_j d_j dbar_j f`.
    pub fn laplacian(&self) -> Self {
        let mut acc = Self::zero(self.n);
        for j in 0..self.n {
            let d = self.dbar(j).and_then(|g| g.dbar_star(j)).expect("index in range");
            acc = acc.add(&d);
        }
        acc.scale(&exact_int(4, 0)).canonical()
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().is_empty()
    }

    pub fn is_holomorphic(&self) -> bool {
        (0..self.n).all(|j| self.dbar(j).expect("index in range").is_zero())
    }

    /// Numerator polynomial `N` with `f = N / |z|^{2M}`, `M = max m`.
    fn cleared_numerator(&self) -> Poly {
        let big_m = self.max_m();
        let base = Self::norm_sq_poly(self.n).as_poly();
        let mut powers: Vec<Poly> = vec![Self::one(self.n).as_poly()];
        for k in 1..=big_m as usize {
            let next = poly_mul(&powers[k - 1], &base);
            powers.push(next);
        }
        let mut out = Poly::new();
        for (k, c) in &self.terms {
            let lift = &powers[(big_m - k.m) as usize];
            for ((p, q), c2) in lift {
                let key = (&k.p + p, &k.q + q);
                let entry = out.entry(key).or_insert_with(ExactComplex::zero);
                *entry = entry.clone() + c.clone() * c2.clone();
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn as_poly(&self) -> Poly {
        debug_assert!(self.is_polynomial());
        self.terms.iter().map(|(k, c)| ((k.p.clone(), k.q.clone()), c.clone())).collect()
    }

    /// Exact test for the zero function on `C^n \ {0}`.
    pub fn is_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        self.cleared_numerator().is_empty()
    }

    /// Identically-zero functions collapse to the empty term set; other
    /// functions are returned unchanged.
    pub fn canonical(self) -> Self {
        if self.is_zero() {
            Self::zero(self.n)
        } else {
            self
        }
    }

    /// Exact equality as functions on `C^n \ {0}`.
    pub fn equals(&self, other: &Self) -> bool {
        self.n == other.n && self.sub(other).is_zero()
    }

    /// Euler operator `sum_j (z_j d_j + zb_j dbar_j) f`.
    pub fn euler_operator(&self) -> Self {
        let mut acc = Self::zero(self.n);
        for j in 0..self.n {
            let holo = Self::z(self.n, j).mul(&self.dbar_star(j).expect("index in range"));
            let anti = Self::zbar(self.n, j).mul(&self.dbar(j).expect("index in range"));
            acc = acc.add(&holo).add(&anti);
        }
        acc
    }

    /// Antiholomorphic Euler operator `sum_j zb_j dbar_j f`.
    pub fn antiholomorphic_euler(&self) -> Self {
        let mut acc = Self::zero(self.n);
        for j in 0..self.n {
            acc = acc.add(&Self::zbar(self.n, j).mul(&self.dbar(j).expect("index in range")));
        }
        acc
    }

    /// Degree of positive homogeneity, verified symbolically through the
    /// Euler identity. The zero function reports degree 0.
    pub fn euler_degree(&self) -> EulerDegree {
        let mut degrees = self.terms.keys().map(TermKey::degree);
        let Some(first) = degrees.next() else {
            return EulerDegree::Homogeneous(0);
        };
        if degrees.any(|d| d != first) {
            // Mixed per-term degrees can still describe a homogeneous function
            // (e.g. `|z|^2 |z|^{-2} - 1`); the Euler identity decides.
            let euler = self.euler_operator();
            return match self.canonical_degree() {
                Some(d) if euler.equals(&self.scale(&exact_int(d, 0))) => EulerDegree::Homogeneous(d),
                _ => EulerDegree::Inhomogeneous,
            };
        }
        let lhs = self.euler_operator();
        if lhs.equals(&self.scale(&exact_int(first, 0))) {
            EulerDegree::Homogeneous(first)
        } else {
            EulerDegree::Inhomogeneous
        }
    }

    fn canonical_degree(&self) -> Option<i64> {
        let num = self.cleared_numerator();
        let mut degs = num.keys().map(|(p, q)| (p.order() + q.order()) as i64);
        let first = degs.next()?;
        if degs.all(|d| d == first) {
            Some(first - 2 * self.max_m() as i64)
        } else {
            None
        }
    }

    /// Polynomial agreeing with `f` on the sphere `|z| = radius`.
    pub fn trace_on_sphere(&self, radius: &ExactRational) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            let factor = exact_real(rational_pow(radius, -2 * k.m as i64));
            out.add_term(c.clone() * factor, TermKey { p: k.p.clone(), q: k.q.clone(), m: 0 });
        }
        out
    }

    /// `z -> f(t z)` for real `t > 0`.
    pub fn dilate(&self, t: &ExactRational) -> Self {
        let mut out = Self::zero(self.n);
        for (k, c) in &self.terms {
            let factor = exact_real(rational_pow(t, k.degree()));
            out.add_term(c.clone() * factor, k.clone());
        }
        out
    }

    /// Numerical value at `z`.
    pub fn evaluate(&self, z: &CPoint) -> Result<Complex64> {
        self.compile().evaluate(z)
    }

    /// Floating-point copy suited to repeated evaluation.
    pub fn compile(&self) -> NumericKelvin {
        NumericKelvin {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| NumericTerm {
                    coeff: exact_to_complex(c),
                    p: k.p.exps().to_vec(),
                    q: k.q.exps().to_vec(),
                    m: k.m,
                })
                .collect(),
        }
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(k, c)| TermRecord {
                coeff_re: format_rational(&c.re),
                coeff_im: format_rational(&c.im),
                p: k.p.exps().to_vec(),
                q: k.q.exps().to_vec(),
                m: k.m,
            })
            .collect()
    }

    pub fn from_records(n: usize, records: &[TermRecord]) -> Result<Self> {
        let terms = records
            .iter()
            .map(|r| {
                Ok(KelvinTerm {
                    coeff: exact(parse_rational(&r.coeff_re)?, parse_rational(&r.coeff_im)?),
                    key: TermKey { p: MultiIndex::new(r.p.clone()), q: MultiIndex::new(r.q.clone()), m: r.m },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, terms)
    }
}

/// JSON form of a single term with exact coefficient strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff_re: String,
    pub coeff_im: String,
    pub p: Vec<u32>,
    pub q: Vec<u32>,
    pub m: u32,
}

#[derive(Serialize, Deserialize)]
struct KelvinFunctionRepr {
    n: usize,
    terms: Vec<TermRecord>,
}

impl Serialize for KelvinFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        KelvinFunctionRepr { n: self.n, terms: self.to_records() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for KelvinFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = KelvinFunctionRepr::deserialize(d)?;
        if repr.n == 0 {
            return Err(serde::de::Error::custom("dimension must be >= 1"));
        }
        KelvinFunction::from_records(repr.n, &repr.terms).map_err(serde::de::Error::custom)
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, c: &ExactComplex) -> fmt::Result {
    if c.im.is_zero() {
        write!(f, "{}", format_rational(&c.re))
    } else if c.re.is_zero() {
        write!(f, "{}i", format_rational(&c.im))
    } else {
        write!(f, "({}+{}i)", format_rational(&c.re), format_rational(&c.im))
    }
}

impl fmt::Display for KelvinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write_coeff(f, c)?;
            for (j, &e) in k.p.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*z{}", j + 1)?,
                    _ => write!(f, "*z{}^{}", j + 1, e)?,
                }
            }
            for (j, &e) in k.q.exps().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*zb{}", j + 1)?,
                    _ => write!(f, "*zb{}^{}", j + 1, e)?,
                }
            }
            if k.m > 0 {
                write!(f, "*|z|^-{}", 2 * k.m)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct NumericTerm {
    coeff: Complex64,
    p: Vec<u32>,
    q: Vec<u32>,
    m: u32,
}

/// Floating-point image of a [`KelvinFunction`].
#[derive(Debug, Clone)]
pub struct NumericKelvin {
    n: usize,
    terms: Vec<NumericTerm>,
}

impl NumericKelvin {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn evaluate(&self, z: &CPoint) -> Result<Complex64> {
        if z.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: z.dim() });
        }
        let r2 = z.norm_sq();
        if r2 == 0.0 && self.terms.iter().any(|t| t.m > 0) {
            return Err(Error::SingularEvaluation);
        }
        Ok(self.evaluate_unchecked(z, r2))
    }

    pub(crate) fn evaluate_unchecked(&self, z: &CPoint, r2: f64) -> Complex64 {
        let mut acc = crate::par::CompensatedComplexSum::new();
        let zc = z.coords();
        for t in &self.terms {
            let mut v = t.coeff;
            for (j, zj) in zc.iter().enumerate().take(self.n) {
                if t.p[j] > 0 {
                    v *= zj.powu(t.p[j]);
                }
                if t.q[j] > 0 {
                    v *= zj.conj().powu(t.q[j]);
                }
            }
            if t.m > 0 {
                v /= r2.powi(t.m as i32);
            }
            acc.add(v);
        }
        acc.value()
    }
}

/// A row `(g_1, .., g_n)` of Kelvin functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KelvinVector {
    pub components: Vec<KelvinFunction>,
}

impl KelvinVector {
    pub fn new(components: Vec<KelvinFunction>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::InvalidInput("empty vector".into()));
        }
        if let Some(c) = components.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: c.dim() });
        }
        Ok(KelvinVector { components })
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// `sum_j d_j g_j`, the formal adjoint `dbar^*` applied to the row.
    pub fn adjoint_divergence(&self) -> KelvinFunction {
        let n = self.dim();
        let mut acc = KelvinFunction::zero(n);
        for (j, g) in self.components.iter().enumerate() {
            acc = acc.add(&g.dbar_star(j).expect("index in range"));
        }
        acc.canonical()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(KelvinFunction::is_zero)
    }

    pub fn scale(&self, c: &ExactComplex) -> Self {
        KelvinVector { components: self.components.iter().map(|g| g.scale(c)).collect() }
    }
}

/// `g^{(p,q)} = dbar(2 zb^q z^p / |z|^{2n+2|q|-2})`.
pub fn make_annihilator(p: &MultiIndex, q: &MultiIndex, n: usize) -> Result<KelvinVector> {
    if n == 0 {
        return Err(Error::InvalidInput("dimension must be >= 1".into()));
    }
    if p.dim() != n || q.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.dim().max(q.dim()) });
    }
    let m = n as u32 + q.order() - 1;
    let potential = KelvinFunction::term(n, exact_int(2, 0), p.clone(), q.clone(), m);
    Ok(potential.dbar_vector())
}

/// Shorthand for a real rational coefficient.
pub fn coeff(num: i64, den: i64) -> ExactComplex {
    exact_real(rational(num, den))
}
