//! Quadrature on spheres `S^{2n-1}_R` and closed-form monomial moments.
//!
//! Schemes:
//! * `n = 1`: trapezoid rule on the circle.
//! * `n = 2`: tensor rule on `(z_1, z_2) = R (e^{i a} cos t, e^{i b} sin t)`,
//!   uniform in the two angles and Gauss-Legendre in `t in [0, pi/2]`, with
//!   surface element `R^3 cos t sin t dt da db`.
//! * `n >= 3`: equal-weight Halton points pushed to the sphere through a
//!   Box-Muller map. Convergence is only quasi-Monte Carlo (roughly `N^{-1}`
//!   up to log factors); moments are not reproduced to high accuracy.
//!
//! Near-singular integrands are handled by focused rules
//! ([`SphereQuadrature::focused`]) that grade panels geometrically toward a
//! chosen surface point.

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, CompensatedComplexSum, Execution};
use crate::types::{factorial, monomial_eval_unchecked, CPoint, ExactRational, MultiIndex};

/// Surface area of the unit sphere `S^{2n-1}` in `R^{2n}`: `2 pi^n / (n-1)!`.
pub fn unit_sphere_area(n: usize) -> f64 {
    let fact: f64 = (1..n).map(|k| k as f64).product();
    2.0 * PI.powi(n as i32) / fact
}

/// Resolution of a sphere rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Resolution {
    Circle { points: usize },
    Hopf { phi1: usize, phi2: usize, eta: usize },
    Scattered { points: usize },
}

impl Resolution {
    pub fn default_for(n: usize) -> Self {
        match n {
            1 => Resolution::Circle { points: 64 },
            2 => Resolution::Hopf { phi1: 32, phi2: 32, eta: 24 },
            _ => Resolution::Scattered { points: 1 << 16 },
        }
    }

    /// Interprets an `A x B x C` triple for dimension `n`: the circle uses
    /// `A` points, the Hopf rule uses `(A, B, C)` and the scattered rule uses
    /// `A * B * C` points.
    pub fn from_triple(n: usize, triple: [usize; 3]) -> Self {
        match n {
            1 => Resolution::Circle { points: triple[0] },
            2 => Resolution::Hopf { phi1: triple[0], phi2: triple[1], eta: triple[2] },
            _ => Resolution::Scattered { points: triple[0] * triple[1] * triple[2] },
        }
    }

    /// Every axis multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Self {
        match *self {
            Resolution::Circle { points } => Resolution::Circle { points: points * factor },
            Resolution::Hopf { phi1, phi2, eta } => {
                Resolution::Hopf { phi1: phi1 * factor, phi2: phi2 * factor, eta: eta * factor }
            }
            Resolution::Scattered { points } => Resolution::Scattered { points: points * factor },
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match (*self, n) {
            (Resolution::Circle { points }, 1) if points >= 8 => Ok(()),
            (Resolution::Hopf { phi1, phi2, eta }, 2) if phi1 >= 4 && phi2 >= 4 && eta >= 2 => Ok(()),
            (Resolution::Scattered { points }, n) if n >= 3 && points >= 64 => Ok(()),
            (r, n) => Err(Error::InvalidResolution(format!("{r:?} is not valid for n = {n}"))),
        }
    }
}

/// How the nodes were produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scheme {
    Circle,
    Hopf,
    Scattered,
    Focused { distance: f64 },
    Imported,
}

/// Nodes, positive weights and outward unit normals on `|z| = R`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    n: usize,
    radius: f64,
    nodes: Vec<CPoint>,
    weights: Vec<f64>,
    scheme: Scheme,
    resolution: Option<Resolution>,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 0 {
                1.0
            } else if m == 1 {
                x
            } else {
                p1
            };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule over consecutive panel edges.
fn composite_rule(edges: &[f64], per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(per_panel);
    let mut nodes = Vec::with_capacity(edges.len() * per_panel);
    let mut weights = Vec::with_capacity(edges.len() * per_panel);
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + half * xi);
            weights.push(half * wi);
        }
    }
    (nodes, weights)
}

/// Panel edges on `[0, end]`, geometrically graded toward 0 starting at `first`.
fn graded_edges(first: f64, end: f64) -> Vec<f64> {
    let mut edges = vec![0.0];
    let mut t = first.min(end);
    while t < end {
        edges.push(t);
        t *= 2.0;
    }
    let len = edges.len();
    let last = edges[len - 1];
    if len > 2 && end - last < 0.25 * last {
        edges[len - 1] = end;
    } else {
        edges.push(end);
    }
    edges
}

/// Symmetric graded edges on `[-end, end]` with a central panel `[-first, first]`.
fn symmetric_graded_edges(first: f64, end: f64) -> Vec<f64> {
    let right = graded_edges(first, end);
    let mut edges: Vec<f64> = right[1..].iter().rev().map(|x| -x).collect();
    edges.extend_from_slice(&right[1..]);
    edges
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Options for [`SphereQuadrature::focused`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocusOptions {
    /// Gauss-Legendre points per graded panel.
    pub panel_points: usize,
    /// Uniform points in the angle transverse to the focus (n = 2 only).
    pub transverse_points: usize,
}

impl Default for FocusOptions {
    fn default() -> Self {
        FocusOptions { panel_points: 12, transverse_points: 32 }
    }
}

impl SphereQuadrature {
    pub fn build(n: usize, radius: f64, resolution: Resolution) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("dimension must be >= 1".into()));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        resolution.validate(n)?;
        let mut quad = match resolution {
            Resolution::Circle { points } => Self::circle(radius, points),
            Resolution::Hopf { phi1, phi2, eta } => Self::hopf(radius, phi1, phi2, eta),
            Resolution::Scattered { points } => Self::scattered(n, radius, points)?,
        };
        quad.resolution = Some(resolution);
        Ok(quad)
    }

    pub fn build_default(n: usize, radius: f64) -> Result<Self> {
        Self::build(n, radius, Resolution::default_for(n))
    }

    fn circle(radius: f64, points: usize) -> Self {
        let w = 2.0 * PI * radius / points as f64;
        let nodes = (0..points)
            .map(|k| CPoint::new(vec![Complex64::from_polar(radius, 2.0 * PI * k as f64 / points as f64)]))
            .collect();
        SphereQuadrature { n: 1, radius, nodes, weights: vec![w; points], scheme: Scheme::Circle, resolution: None }
    }

    fn hopf(radius: f64, n1: usize, n2: usize, ne: usize) -> Self {
        let (x, w) = gauss_legendre(ne);
        let quarter = 0.25 * PI;
        let dphi = (2.0 * PI / n1 as f64) * (2.0 * PI / n2 as f64);
        let r3 = radius.powi(3);
        let mut nodes = Vec::with_capacity(n1 * n2 * ne);
        let mut weights = Vec::with_capacity(n1 * n2 * ne);
        for (xe, we) in x.iter().zip(&w) {
            let eta = quarter * (xe + 1.0);
            let (s, c) = eta.sin_cos();
            let weight = r3 * c * s * quarter * we * dphi;
            for a in 0..n1 {
                let phi1 = 2.0 * PI * a as f64 / n1 as f64;
                let z1 = Complex64::from_polar(radius * c, phi1);
                for b in 0..n2 {
                    let phi2 = 2.0 * PI * b as f64 / n2 as f64;
                    nodes.push(CPoint::new(vec![z1, Complex64::from_polar(radius * s, phi2)]));
                    weights.push(weight);
                }
            }
        }
        SphereQuadrature { n: 2, radius, nodes, weights, scheme: Scheme::Hopf, resolution: None }
    }

    fn scattered(n: usize, radius: f64, points: usize) -> Result<Self> {
        if 2 * n > PRIMES.len() {
            return Err(Error::Unsupported(format!("scattered rule supports n <= {}", PRIMES.len() / 2)));
        }
        let area = unit_sphere_area(n) * radius.powi(2 * n as i32 - 1);
        let mut nodes = Vec::with_capacity(points);
        for i in 0..points as u64 {
            // Offset by one to skip the all-zero Halton point.
            let u: Vec<f64> = (0..2 * n).map(|k| radical_inverse(i + 1, PRIMES[k])).collect();
            let mut x = vec![0.0; 2 * n];
            for k in 0..n {
                let r = (-2.0 * (1.0 - u[2 * k]).max(f64::MIN_POSITIVE).ln()).sqrt();
                let th = 2.0 * PI * u[2 * k + 1];
                x[2 * k] = r * th.cos();
                x[2 * k + 1] = r * th.sin();
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let x: Vec<f64> = x.iter().map(|v| v * radius / norm).collect();
            nodes.push(CPoint::from_real(&x)?);
        }
        Ok(SphereQuadrature {
            n,
            radius,
            nodes,
            weights: vec![area / points as f64; points],
            scheme: Scheme::Scattered,
            resolution: None,
        })
    }

    /// Rule graded toward the surface point `focus`, accurate for integrands
    /// with a near singularity at distance `distance` from `focus` along the
    /// normal. Supported for `n = 1` and `n = 2`.
    pub fn focused(n: usize, radius: f64, focus: &CPoint, distance: f64, opts: FocusOptions) -> Result<Self> {
        if focus.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: focus.dim() });
        }
        let fr = focus.norm();
        if (fr - radius).abs() > 1e-9 * radius {
            return Err(Error::NotOnSphere { norm: fr, radius });
        }
        if distance.is_nan() || distance <= 0.0 {
            return Err(Error::InvalidInput("focus distance must be positive".into()));
        }
        let a = focus.scale(1.0 / radius);
        let s = (distance / radius).min(0.5);
        match n {
            1 => {
                let edges = symmetric_graded_edges(0.5 * s, PI);
                let (t, w) = composite_rule(&edges, opts.panel_points);
                let nodes = t.iter().map(|&phi| CPoint::new(vec![a[0] * Complex64::from_polar(radius, phi)])).collect();
                let weights = w.iter().map(|wi| wi * radius).collect();
                Ok(SphereQuadrature {
                    n,
                    radius,
                    nodes,
                    weights,
                    scheme: Scheme::Focused { distance },
                    resolution: None,
                })
            }
            2 => {
                // Unitary frame with first column a = focus / R.
                let (a1, a2) = (a[0], a[1]);
                let (b1, b2) = (-a2.conj(), a1.conj());
                let phi_edges = symmetric_graded_edges(0.5 * s, PI);
                let eta_edges = graded_edges(0.5 * s, 0.5 * PI);
                let (phi, wphi) = composite_rule(&phi_edges, opts.panel_points);
                let (eta, weta) = composite_rule(&eta_edges, opts.panel_points);
                let nt = opts.transverse_points;
                let dpsi = 2.0 * PI / nt as f64;
                let r3 = radius.powi(3);
                let mut nodes = Vec::with_capacity(phi.len() * eta.len() * nt);
                let mut weights = Vec::with_capacity(phi.len() * eta.len() * nt);
                for (e, we) in eta.iter().zip(&weta) {
                    let (se, ce) = e.sin_cos();
                    for (p, wp) in phi.iter().zip(&wphi) {
                        let u = Complex64::from_polar(radius * ce, *p);
                        let weight = r3 * ce * se * we * wp * dpsi;
                        for k in 0..nt {
                            let v = Complex64::from_polar(radius * se, dpsi * k as f64);
                            nodes.push(CPoint::new(vec![a1 * u + b1 * v, a2 * u + b2 * v]));
                            weights.push(weight);
                        }
                    }
                }
                Ok(SphereQuadrature {
                    n,
                    radius,
                    nodes,
                    weights,
                    scheme: Scheme::Focused { distance },
                    resolution: None,
                })
            }
            _ => Err(Error::Unsupported(format!("focused rules are implemented for n <= 2, got n = {n}"))),
        }
    }

    /// The same rule on a sphere of a different radius.
    pub fn rescaled(&self, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        let t = radius / self.radius;
        let wscale = t.powi(2 * self.n as i32 - 1);
        Ok(SphereQuadrature {
            n: self.n,
            radius,
            nodes: self.nodes.iter().map(|z| z.scale(t)).collect(),
            weights: self.weights.iter().map(|w| w * wscale).collect(),
            scheme: self.scheme.clone(),
            resolution: self.resolution,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> &[CPoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    /// The resolution this rule was built from, if it came from [`build`](Self::build).
    pub fn resolution(&self) -> Option<Resolution> {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Outward unit normal `x / R` at node `i`, as a real 2n-vector.
    pub fn normal(&self, i: usize) -> Vec<f64> {
        self.nodes[i].to_real().iter().map(|x| x / self.radius).collect()
    }

    pub fn total_weight(&self) -> f64 {
        let mut acc = par::CompensatedSum::new();
        for w in &self.weights {
            acc.add(*w);
        }
        acc.value()
    }

    /// `sum_i w_i f(node_i)`, compensated and folded in node order.
    pub fn integrate<F>(&self, f: F) -> Result<Complex64>
    where
        F: Fn(&CPoint) -> Complex64 + Sync + Send,
    {
        self.integrate_with(Execution::default(), f)
    }

    pub fn integrate_with<F>(&self, exec: Execution, f: F) -> Result<Complex64>
    where
        F: Fn(&CPoint) -> Complex64 + Sync + Send,
    {
        let values = par::map_indexed(exec, self.nodes.len(), |i| f(&self.nodes[i]) * self.weights[i]);
        let mut acc = CompensatedComplexSum::new();
        for (i, v) in values.into_iter().enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite { node: i });
            }
            acc.add(v);
        }
        Ok(acc.value())
    }

    /// Integral of pre-sampled node values.
    pub fn integrate_samples(&self, values: &[Complex64]) -> Result<Complex64> {
        if values.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch { expected: self.nodes.len(), found: values.len() });
        }
        let mut acc = CompensatedComplexSum::new();
        for (i, (v, w)) in values.iter().zip(&self.weights).enumerate() {
            let t = v * *w;
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(Error::NonFinite { node: i });
            }
            acc.add(t);
        }
        Ok(acc.value())
    }

    /// Writes `x_1..x_2n, weight, nu_1..nu_2n` rows with a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let d = 2 * self.n;
        let mut header: Vec<String> = (1..=d).map(|k| format!("x{k}")).collect();
        header.push("weight".into());
        header.extend((1..=d).map(|k| format!("nu{k}")));
        w.write_record(&header).map_err(csv_err)?;
        for i in 0..self.nodes.len() {
            let mut row: Vec<String> = self.nodes[i].to_real().iter().map(|x| format!("{x:e}")).collect();
            row.push(format!("{:e}", self.weights[i]));
            row.extend(self.normal(i).iter().map(|x| format!("{x:e}")));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let cols = r.headers().map_err(csv_err)?.len();
        if cols < 5 || (cols - 1) % 4 != 0 {
            return Err(Error::InvalidInput(format!("unexpected column count {cols}")));
        }
        let d = (cols - 1) / 2;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(csv_err)?;
            let vals = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|_| Error::InvalidInput(format!("bad number {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            nodes.push(CPoint::from_real(&vals[..d])?);
            weights.push(vals[d]);
        }
        let first = nodes.first().ok_or_else(|| Error::InvalidInput("empty quadrature file".into()))?;
        let radius = first.norm();
        Ok(SphereQuadrature { n: d / 2, radius, nodes, weights, scheme: Scheme::Imported, resolution: None })
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

/// Exact moment over the unit sphere divided by `pi^n`:
/// `2 p! / (n - 1 + |p|)!` when `p == q`, zero otherwise.
pub fn unit_moment_over_pi_n(p: &MultiIndex, q: &MultiIndex) -> ExactRational {
    if p != q {
        return BigRational::from_integer(BigInt::from(0));
    }
    let n = p.dim() as u64;
    BigRational::new(BigInt::from(2) * p.factorial(), factorial(n - 1 + p.order() as u64))
}

/// `int_{|z| = R} z^p conj(z)^q ds`.
pub fn exact_monomial_moment(p: &MultiIndex, q: &MultiIndex, n: usize, radius: f64) -> Result<Complex64> {
    if p.dim() != n || q.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: p.dim().max(q.dim()) });
    }
    if p != q {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let c = crate::types::rational_to_f64(&unit_moment_over_pi_n(p, q));
    let power = 2 * n as i32 - 1 + 2 * p.order() as i32;
    Ok(Complex64::new(c * PI.powi(n as i32) * radius.powi(power), 0.0))
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub value: Complex64,
    pub std_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// `|value - reference| <= k * std_error` (with an absolute floor for
    /// zero-variance integrands).
    pub fn agrees_with(&self, reference: Complex64, k: f64) -> bool {
        (self.value - reference).norm() <= k * self.std_error + 1e-12 * (1.0 + reference.norm())
    }
}

/// Monte Carlo estimate of `int_{|z| = R} z^p conj(z)^q ds` from Gaussian
/// directions. The sample stream is split into fixed chunks with independent
/// ChaCha streams, so the estimate depends only on `seed` and `samples`.
pub fn monte_carlo_moment(
    p: &MultiIndex,
    q: &MultiIndex,
    radius: f64,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloEstimate> {
    let n = p.dim();
    if q.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.dim() });
    }
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    const CHUNKS: usize = 64;
    let per = samples.div_ceil(CHUNKS);
    let partial = par::map_indexed(exec, CHUNKS, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let count = per.min(samples.saturating_sub(c * per));
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sq_re = 0.0;
        let mut sq_im = 0.0;
        let mut x = vec![0.0; 2 * n];
        for _ in 0..count {
            for v in x.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let pt: Vec<f64> = x.iter().map(|v| v * radius / norm).collect();
            let z = CPoint::from_real(&pt).expect("even length");
            let f = monomial_eval_unchecked(p, q, &z);
            sum += f;
            sq_re += f.re * f.re;
            sq_im += f.im * f.im;
        }
        (count, sum, sq_re, sq_im)
    });
    let mut total = 0usize;
    let mut sum = Complex64::new(0.0, 0.0);
    let (mut sq_re, mut sq_im) = (0.0, 0.0);
    for (c, s, a, b) in partial {
        total += c;
        sum += s;
        sq_re += a;
        sq_im += b;
    }
    let nf = total as f64;
    let mean = sum / nf;
    let var = ((sq_re / nf - mean.re * mean.re) + (sq_im / nf - mean.im * mean.im)).max(0.0) * nf / (nf - 1.0);
    let area = unit_sphere_area(n) * radius.powi(2 * n as i32 - 1);
    Ok(MonteCarloEstimate { value: mean * area, std_error: area * (var / nf).sqrt(), samples: total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(v: &[u32]) -> MultiIndex {
        MultiIndex::new(v.to_vec())
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for m in [1usize, 2, 5, 12, 24] {
            let (x, w) = gauss_legendre(m);
            for deg in 0..(2 * m) {
                let approx: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((approx - exact).abs() < 1e-13, "m={m} deg={deg}");
            }
        }
    }

    #[test]
    fn circle_rule_example() {
        let q = SphereQuadrature::build(1, 1.0, Resolution::Circle { points: 64 }).unwrap();
        assert_eq!(q.len(), 64);
        for w in q.weights() {
            assert!((w - 2.0 * PI / 64.0).abs() < 1e-15);
        }
        assert!((q.total_weight() - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn hopf_rule_total_weight() {
        for radius in [1.0, 2.0] {
            let q = SphereQuadrature::build_default(2, radius).unwrap();
            let area = 2.0 * PI * PI * radius.powi(3);
            assert!((q.total_weight() - area).abs() <= 1e-10 * area);
        }
    }

    #[test]
    fn invalid_resolution_rejected() {
        assert!(matches!(
            SphereQuadrature::build(2, 1.0, Resolution::Hopf { phi1: 2, phi2: 8, eta: 8 }),
            Err(Error::InvalidResolution(_))
        ));
        assert!(SphereQuadrature::build(1, 1.0, Resolution::Hopf { phi1: 8, phi2: 8, eta: 8 }).is_err());
        assert!(SphereQuadrature::build(2, -1.0, Resolution::default_for(2)).is_err());
    }

    #[test]
    fn nodes_on_sphere_with_unit_normals() {
        for (n, radius) in [(1, 1.5), (2, 0.8), (3, 1.0)] {
            let res = match n {
                3 => Resolution::Scattered { points: 512 },
                _ => Resolution::default_for(n),
            };
            let q = SphereQuadrature::build(n, radius, res).unwrap();
            for (i, z) in q.nodes().iter().enumerate() {
                assert!((z.norm_sq() - radius * radius).abs() <= 1e-12);
                let nu = q.normal(i);
                let dot: f64 = z.to_real().iter().zip(&nu).map(|(a, b)| a * b).sum();
                assert!((dot - radius).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn integrate_examples() {
        let q = SphereQuadrature::build_default(2, 1.0).unwrap();
        let one = q.integrate(|_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.re - 2.0 * PI * PI).abs() < 1e-10);
        let odd = q.integrate(|z| z[0]).unwrap();
        assert!(odd.norm() < 1e-10);
        let m = q.integrate(|z| Complex64::new(z[0].norm_sqr(), 0.0)).unwrap();
        assert!((m.re - PI * PI).abs() < 1e-10);
        let bad = q.integrate(|_| Complex64::new(f64::NAN, 0.0));
        assert_eq!(bad.unwrap_err(), Error::NonFinite { node: 0 });
    }

    #[test]
    fn moment_examples() {
        let m = exact_monomial_moment(&mi(&[1, 0]), &mi(&[0, 1]), 2, 1.0).unwrap();
        assert_eq!(m, Complex64::new(0.0, 0.0));
        let m = exact_monomial_moment(&mi(&[0, 0]), &mi(&[0, 0]), 2, 1.0).unwrap();
        assert!((m.re - 2.0 * PI * PI).abs() < 1e-12);
        let m = exact_monomial_moment(&mi(&[1, 0]), &mi(&[1, 0]), 2, 1.0).unwrap();
        assert!((m.re - PI * PI).abs() < 1e-12);
        let m = exact_monomial_moment(&mi(&[0]), &mi(&[0]), 1, 3.0).unwrap();
        assert!((m.re - 6.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn moments_cross_validate_against_hopf_rule() {
        let q = SphereQuadrature::build_default(2, 1.0).unwrap();
        let all = MultiIndex::all_up_to(2, 4);
        for p in &all {
            for qq in &all {
                if p.order() + qq.order() > 8 {
                    continue;
                }
                let exact = exact_monomial_moment(p, qq, 2, 1.0).unwrap();
                let num = q.integrate(|z| monomial_eval_unchecked(p, qq, z)).unwrap();
                assert!((num - exact).norm() <= 1e-8 * exact.norm().max(1.0), "p={p} q={qq}");
            }
        }
    }

    #[test]
    fn refinement_does_not_increase_error() {
        let p = mi(&[3, 1]);
        let exact = exact_monomial_moment(&p, &p, 2, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for res in [Resolution::Hopf { phi1: 8, phi2: 8, eta: 3 }, Resolution::Hopf { phi1: 16, phi2: 16, eta: 6 }] {
            let q = SphereQuadrature::build(2, 1.0, res).unwrap();
            let err = (q.integrate(|z| monomial_eval_unchecked(&p, &p, z)).unwrap() - exact).norm();
            assert!(err <= prev || err < 1e-12);
            prev = err;
        }
    }

    #[test]
    fn focused_rule_is_a_sphere_rule() {
        let focus = CPoint::new(vec![Complex64::from_polar(0.6, 0.3), Complex64::from_polar(0.8, -1.1)]);
        let q = SphereQuadrature::focused(2, 1.0, &focus, 0.05, FocusOptions::default()).unwrap();
        assert!((q.total_weight() - 2.0 * PI * PI).abs() < 1e-10);
        for z in q.nodes() {
            assert!((z.norm_sq() - 1.0).abs() < 1e-12);
        }
        let p = mi(&[2, 1]);
        let exact = exact_monomial_moment(&p, &p, 2, 1.0).unwrap();
        let num = q.integrate(|z| monomial_eval_unchecked(&p, &p, z)).unwrap();
        assert!((num - exact).norm() < 1e-10);

        let focus = CPoint::new(vec![Complex64::from_polar(2.0, 0.7)]);
        let q = SphereQuadrature::focused(1, 2.0, &focus, 0.01, FocusOptions::default()).unwrap();
        assert!((q.total_weight() - 4.0 * PI).abs() < 1e-12);
        let off = CPoint::new(vec![Complex64::new(1.0, 0.0)]);
        assert!(matches!(
            SphereQuadrature::focused(1, 2.0, &off, 0.01, FocusOptions::default()),
            Err(Error::NotOnSphere { .. })
        ));
    }

    #[test]
    fn csv_round_trip() {
        let q = SphereQuadrature::build(2, 1.3, Resolution::Hopf { phi1: 4, phi2: 4, eta: 2 }).unwrap();
        let mut buf = Vec::new();
        q.write_csv(&mut buf).unwrap();
        let back = SphereQuadrature::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), q.len());
        assert_eq!(back.weights(), q.weights());
        assert_eq!(back.nodes(), q.nodes());
        assert!((back.radius() - 1.3).abs() < 1e-14);
    }

    #[test]
    fn scattered_rule_is_roughly_right() {
        let q = SphereQuadrature::build(3, 1.0, Resolution::Scattered { points: 1 << 14 }).unwrap();
        assert!((q.total_weight() - unit_sphere_area(3)).abs() < 1e-10);
        let p = mi(&[1, 0, 0]);
        let exact = exact_monomial_moment(&p, &p, 3, 1.0).unwrap();
        let num = q.integrate(|z| monomial_eval_unchecked(&p, &p, z)).unwrap();
        assert!((num - exact).norm() < 0.02 * exact.norm());
    }
}
