//! The verification suites behind each subcommand.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use holodual_core::harmonics::{
    dimension_formula, kelvin_extend, polynomial_degree, BallForm, BoundaryExpansion, HarmonicFamily,
};
use holodual_core::integrals::sphere_inner;
use holodual_core::kelvin::make_annihilator;
use holodual_core::pairings::{
    annihilator_suite, cauchy_pairing_1d, contour_independence, contrast_vector, density_probe, energy_identity_check,
    grothendieck_pairing, paper_pairing_exact, principal_part, random_admissible, random_holomorphic, PairingReport,
    PairingRow, RowKind,
};
use holodual_core::potentials::{
    bm_kernel_density, bm_kernel_density_via_phi, calibrate_surface_constant, complex_normal_derivative, cr_test,
    decay_check, jump_check, sample_points, surface_form_constant, surface_form_density, BmEvaluator,
};
use holodual_core::quadrature::{unit_sphere_area, Resolution, SphereQuadrature};
use holodual_core::types::{exact_int, rational_from_f64, ExactRational};
use holodual_core::{CPoint, Complex64, Error, Execution, KelvinFunction, MultiIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{format_resolution, RunConfig};
use crate::report::{digest, Comparison, Environment, Record, Status, SuiteReport, TableRow};
use crate::CliError;

pub const SUITES: [&str; 8] =
    ["harmonics", "reproduce", "cr", "jump", "pairing", "ball-example", "dirichlet", "density-probe"];

/// Outcome of one check body: the measured value and a short note.
type Measured = holodual_core::Result<(f64, String)>;

struct Ctx {
    cfg: RunConfig,
    canonical: String,
    resolution: Resolution,
    radius: ExactRational,
    exec: Execution,
}

impl Ctx {
    fn new(cfg: &RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        Ok(Ctx {
            cfg: cfg.clone(),
            canonical: cfg.canonical(),
            resolution: cfg.quadrature_resolution()?,
            radius: rational_from_f64(cfg.radius).map_err(CliError::Core)?,
            exec: Execution::default(),
        })
    }

    fn n(&self) -> usize {
        self.cfg.n
    }

    fn r(&self) -> f64 {
        self.cfg.radius
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(stream);
        rng
    }

    fn seed(&self, offset: u64) -> u64 {
        self.cfg.seed.wrapping_add(offset)
    }

    fn environment(&self) -> Environment {
        Environment {
            version: env!("CARGO_PKG_VERSION").to_string(),
            n: self.cfg.n,
            radius: self.cfg.radius,
            r_max: self.cfg.r_max,
            s_max: self.cfg.s_max,
            q_max: self.cfg.q_max,
            resolution: format_resolution(&self.resolution),
            seed: self.cfg.seed,
        }
    }

    fn quadrature(&self) -> holodual_core::Result<SphereQuadrature> {
        SphereQuadrature::build(self.n(), self.r(), self.resolution)
    }

    /// The rule used to cross-check exact pairings. The scattered rule used
    /// for `n >= 3` converges too slowly to validate anything at `tol_pairing`.
    fn validator(&self) -> Option<SphereQuadrature> {
        if self.n() <= 2 {
            self.quadrature().ok()
        } else {
            None
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn check(
        &self,
        rep: &mut SuiteReport,
        id: &str,
        inputs: &str,
        expected: &str,
        comparison: Comparison,
        tolerance: f64,
        body: impl FnOnce() -> Measured,
    ) {
        let (value, status, detail) = match body() {
            Ok((v, note)) => {
                let ok = comparison.accepts(v, tolerance);
                (v, if ok { Status::Pass } else { Status::Fail }, note)
            }
            Err(e @ Error::TooCloseToSurface { .. }) => (f64::NAN, Status::Refused, e.to_string()),
            Err(e) => (f64::NAN, Status::Fail, e.to_string()),
        };
        rep.records.push(Record {
            id: id.to_string(),
            inputs_digest: digest(&[&self.canonical, id, inputs]),
            expected: expected.to_string(),
            value,
            tolerance,
            comparison,
            status,
            detail,
        });
    }
}

fn monomial(s: &MultiIndex) -> KelvinFunction {
    KelvinFunction::holomorphic_monomial(s.clone())
}

fn z(n: usize, j: usize) -> KelvinFunction {
    KelvinFunction::z(n, j)
}

fn zb(n: usize, j: usize) -> KelvinFunction {
    KelvinFunction::zbar(n, j)
}

fn table_row(s: &str, q_or_p: &str, r: &PairingReport) -> TableRow {
    let v = r.value();
    TableRow {
        s: s.to_string(),
        q_or_p: q_or_p.to_string(),
        value_re: v.re,
        value_im: v.im,
        method: r.method.as_str().to_string(),
        discrepancy: r.discrepancy,
    }
}

fn row_to_table(row: &PairingRow) -> TableRow {
    let tag = match row.kind {
        RowKind::Annihilator => format!("g(0,{})", row.q_or_p),
        RowKind::Contrast => format!("g({})", row.q_or_p),
    };
    table_row(&row.s.to_string(), &tag, &row.report)
}

/// `<1, dbar |z|^{2-2n}>_3 = (1 - n) c_n |S^{2n-1}|`, independent of `R`.
pub fn contrast_closed_form(n: usize) -> Complex64 {
    surface_form_constant(n) * (1.0 - n as f64) * unit_sphere_area(n)
}

/// `sum_j ||dbar_j |z|^{2-2n}||^2` over `|z| > R`.
pub fn kelvin_one_energy(n: usize, radius: f64) -> f64 {
    if n == 1 {
        return 0.0;
    }
    let fact: f64 = (1..n).map(|k| k as f64).product();
    (n as f64 - 1.0) * PI.powi(n as i32) / fact * radius.powi(2 - 2 * n as i32)
}

fn harmonics(ctx: &Ctx, rep: &mut SuiteReport) {
    let n = ctx.n();
    let family = HarmonicFamily::build_with(n, ctx.cfg.r_max, ctx.exec);
    let mut table = Vec::new();
    let mut bases = serde_json::Map::new();
    for r in 0..=ctx.cfg.r_max {
        let basis = family.basis(r).expect("degree within r_max");
        let j = dimension_formula(r, n);
        let inputs = format!("r={r} n={n}");
        ctx.check(
            rep,
            &format!("harmonics.dimension.r{r}"),
            &inputs,
            &format!("J({r},{}) = {j}", 2 * n),
            Comparison::Exact,
            j as f64,
            || Ok((basis.len() as f64, String::new())),
        );
        ctx.check(
            rep,
            &format!("harmonics.laplacian.r{r}"),
            &inputs,
            "0 non-harmonic (exact)",
            Comparison::Exact,
            0.0,
            || {
                let mut bad = 0;
                for h in &basis.polys {
                    if !h.is_harmonic() {
                        bad += 1;
                    }
                    if !kelvin_extend(h)?.is_harmonic() {
                        bad += 1;
                    }
                }
                Ok((bad as f64, format!("{} polynomials and their Kelvin extensions", basis.len())))
            },
        );
        ctx.check(
            rep,
            &format!("harmonics.orthogonal.r{r}"),
            &inputs,
            "0 off-diagonal (exact)",
            Comparison::Exact,
            0.0,
            || {
                let g = basis.gram();
                let bad = (0..g.len())
                    .flat_map(|i| (0..g.len()).map(move |k| (i, k)))
                    .filter(|&(i, k)| i != k && g[i][k] != exact_int(0, 0))
                    .count();
                Ok((bad as f64, String::new()))
            },
        );
        table.push(json!({ "r": r, "n": n, "J": j, "basis_size": basis.len() }));
        bases.insert(r.to_string(), json!(basis.polys.iter().map(|p| p.to_string()).collect::<Vec<_>>()));
    }
    rep.artifacts.insert("dimension_table".into(), json!(table));
    rep.artifacts.insert("basis".into(), serde_json::Value::Object(bases));
}

fn reproduce(ctx: &Ctx, rep: &mut SuiteReport) {
    let (n, r) = (ctx.n(), ctx.r());
    ctx.check(
        rep,
        "reproduce.kernel_presentation",
        "100 pairs",
        "relative difference <= 1e-12",
        Comparison::AtMost,
        1e-12,
        || {
            let zs = sample_points(n, r, 0.1, 2.0, 100, ctx.seed(11));
            let zetas = sample_points(n, r, 1.0, 1.0, 100, ctx.seed(12));
            let c = surface_form_constant(n);
            let mut worst: f64 = 0.0;
            for (z, zeta) in zs.iter().zip(&zetas) {
                let kappa = surface_form_density(zeta, r, c);
                let a = bm_kernel_density(z, zeta, &kappa)?;
                let b = bm_kernel_density_via_phi(z, zeta, &kappa)?;
                worst = worst.max((a - b).norm() / a.norm());
            }
            Ok((worst, String::new()))
        },
    );
    let calib_point = CPoint::from_real(&(0..2 * n).map(|k| if k == 0 { 0.3 * r } else { 0.0 }).collect::<Vec<_>>())
        .expect("even length");
    let mut fitted = None;
    ctx.check(
        rep,
        "reproduce.calibration.refinement",
        "z = 0.3 R e_1, resolution x2",
        "|c(h) - c(h/2)| <= 1e-8",
        Comparison::AtMost,
        1e-8,
        || {
            let c1 = calibrate_surface_constant(&ctx.quadrature()?, &calib_point)?;
            let fine = SphereQuadrature::build(n, r, ctx.resolution.refined(2))?;
            let c2 = calibrate_surface_constant(&fine, &calib_point)?;
            fitted = Some(c2);
            Ok(((c1 - c2).norm(), format!("c = {:.16e} {:+.16e}i", c2.re, c2.im)))
        },
    );
    ctx.check(rep, "reproduce.calibration.closed_form", "", "c_n = 2^(n-1) i^n", Comparison::AtMost, 1e-8, || {
        let c = fitted.ok_or_else(|| Error::InvalidInput("calibration unavailable".into()))?;
        Ok(((c - surface_form_constant(n)).norm(), String::new()))
    });

    let ev = match BmEvaluator::with_resolution(n, r, ctx.resolution) {
        Ok(ev) => ev,
        Err(e) => {
            ctx.check(rep, "reproduce.setup", "", "quadrature builds", Comparison::Exact, 0.0, || Err(e));
            return;
        }
    };
    let interior = sample_points(n, r, 0.5, 0.95, 10, ctx.seed(13));
    let exterior = sample_points(n, r, 1.05, 1.6, 10, ctx.seed(14));
    let tol = ctx.cfg.tol_reproduction;
    for s in MultiIndex::all_up_to(n, ctx.cfg.s_max) {
        let data = monomial(&s).compile();
        ctx.check(
            rep,
            &format!("reproduce.interior.s{s}"),
            "10 points, |z|/R in [0.5, 0.95]",
            "M u = u",
            Comparison::AtMost,
            tol,
            || {
                let mut worst: f64 = 0.0;
                for e in ev.evaluate_many(&data, &interior) {
                    let e = e?;
                    worst = worst.max((e.value - data.evaluate(&e.z)?).norm());
                }
                Ok((worst, String::new()))
            },
        );
        ctx.check(
            rep,
            &format!("reproduce.exterior.s{s}"),
            "10 points, |z|/R in [1.05, 1.6]",
            "M u = 0",
            Comparison::AtMost,
            tol,
            || {
                let mut worst: f64 = 0.0;
                for e in ev.evaluate_many(&data, &exterior) {
                    worst = worst.max(e?.value.norm());
                }
                Ok((worst, String::new()))
            },
        );
    }
}

type Named = Vec<(&'static str, KelvinFunction)>;

fn cr_data(n: usize) -> (Named, Named) {
    let last = n - 1;
    let cr =
        vec![("z1", z(n, 0)), ("z1*zn", z(n, 0).mul(&z(n, last))), ("z1^2*zn", z(n, 0).mul(&z(n, 0)).mul(&z(n, last)))];
    let non_cr = vec![("conj(z1)", zb(n, 0)), ("conj(z1)*conj(zn)", zb(n, 0).mul(&zb(n, last)))];
    (cr, non_cr)
}

fn cr(ctx: &Ctx, rep: &mut SuiteReport) {
    let (n, r) = (ctx.n(), ctx.r());
    let ev = match BmEvaluator::with_resolution(n, r, ctx.resolution) {
        Ok(ev) => ev,
        Err(e) => {
            ctx.check(rep, "cr.setup", "", "quadrature builds", Comparison::Exact, 0.0, || Err(e));
            return;
        }
    };
    let exterior = sample_points(n, r, 1.05, 1.6, 10, ctx.seed(21));
    let boundary = sample_points(n, r, 1.0, 1.0, 5, ctx.seed(22));
    let (yes, no) = cr_data(n);
    let normal = |f: &KelvinFunction| -> holodual_core::Result<f64> {
        let mut worst: f64 = 0.0;
        for zeta in &boundary {
            worst = worst.max(complex_normal_derivative(f, zeta, r)?.norm());
        }
        Ok(worst)
    };
    for (name, f) in &yes {
        ctx.check(
            rep,
            &format!("cr.exterior.{name}"),
            "10 exterior points",
            "max |M u| small (CR)",
            Comparison::AtMost,
            ctx.cfg.tol_reproduction,
            || {
                let rep = cr_test(&f.compile(), &ev, &exterior)?;
                Ok((rep.max_abs, String::new()))
            },
        );
        ctx.check(
            rep,
            &format!("cr.normal.{name}"),
            "5 boundary points",
            "dbar_nu u = 0",
            Comparison::AtMost,
            1e-12,
            || Ok((normal(f)?, String::new())),
        );
    }
    for (name, f) in &no {
        ctx.check(
            rep,
            &format!("cr.exterior.{name}"),
            "10 exterior points",
            "max |M u| large (not CR)",
            Comparison::AtLeast,
            1e-2,
            || {
                let rep = cr_test(&f.compile(), &ev, &exterior)?;
                Ok((rep.max_abs, String::new()))
            },
        );
        ctx.check(
            rep,
            &format!("cr.normal.{name}"),
            "5 boundary points",
            "dbar_nu u != 0",
            Comparison::AtLeast,
            1e-2,
            || Ok((normal(f)?, String::new())),
        );
    }
}

fn jump(ctx: &Ctx, rep: &mut SuiteReport) {
    let (n, r) = (ctx.n(), ctx.r());
    let ev = match BmEvaluator::with_resolution(n, r, ctx.resolution) {
        Ok(ev) => ev,
        Err(e) => {
            ctx.check(rep, "jump.setup", "", "quadrature builds", Comparison::Exact, 0.0, || Err(e));
            return;
        }
    };
    let last = n - 1;
    let data = [("z1", z(n, 0)), ("conj(z1)", zb(n, 0)), ("z1*conj(zn)", z(n, 0).mul(&zb(n, last)))];
    let points = sample_points(n, r, 1.0, 1.0, 5, ctx.seed(31));
    let offsets: Vec<f64> = [0.16, 0.08, 0.04, 0.02].iter().map(|d| d * r).collect();
    for (name, f) in &data {
        let f = f.compile();
        ctx.check(
            rep,
            &format!("jump.{name}"),
            "5 boundary points, offsets 0.16R..0.02R",
            "M^- - M^+ = u",
            Comparison::AtMost,
            ctx.cfg.tol_jump,
            || {
                let mut worst: f64 = 0.0;
                let mut monotone = true;
                for zeta in &points {
                    let j = jump_check(&f, &ev, zeta, &offsets)?;
                    worst = worst.max((j.jump - f.evaluate(zeta)?).norm());
                    monotone &= j.monotone;
                }
                Ok((worst, if monotone { String::new() } else { "differences not shrinking".into() }))
            },
        );
    }
}

fn pairing(ctx: &Ctx, rep: &mut SuiteReport) {
    let (n, r) = (ctx.n(), ctx.r());
    let tol = ctx.cfg.tol_pairing;
    let quad = ctx.validator();
    let q_list: Vec<MultiIndex> =
        MultiIndex::all_up_to(n, ctx.cfg.q_max).into_iter().filter(|q| q.order() >= 1).collect();
    // For n = 1 the kernel of order 0 is logarithmic and g(0) vanishes.
    let contrast: Vec<MultiIndex> =
        MultiIndex::all_up_to(n, 3).into_iter().filter(|p| n > 1 || p.order() > 0).collect();
    let rows = annihilator_suite(n, &q_list, ctx.cfg.s_max, &contrast, r, quad.as_ref(), ctx.exec);
    match rows {
        Ok(rows) => {
            for q in &q_list {
                let cells: Vec<&PairingRow> =
                    rows.iter().filter(|row| row.kind == RowKind::Annihilator && &row.q_or_p == q).collect();
                let inputs = format!("|s| <= {}", ctx.cfg.s_max);
                ctx.check(
                    rep,
                    &format!("pairing.annihilator.q{q}.exact"),
                    &inputs,
                    "0 nonzero entries (exact)",
                    Comparison::Exact,
                    0.0,
                    || {
                        let bad =
                            cells.iter().filter(|c| !c.report.exact.as_ref().is_some_and(|e| e.is_zero())).count();
                        Ok((bad as f64, format!("{} entries", cells.len())))
                    },
                );
                if quad.is_some() {
                    ctx.check(
                        rep,
                        &format!("pairing.annihilator.q{q}.quadrature"),
                        &inputs,
                        "max |value| ~ 0",
                        Comparison::AtMost,
                        tol,
                        || {
                            let worst = cells
                                .iter()
                                .filter_map(|c| c.report.value_quadrature)
                                .map(|v| v.norm())
                                .fold(0.0, f64::max);
                            Ok((worst, String::new()))
                        },
                    );
                }
            }
            for row in rows.iter().filter(|row| row.kind == RowKind::Contrast) {
                ctx.check(
                    rep,
                    &format!("pairing.contrast.p{}", row.q_or_p),
                    "",
                    "|<z^p, g(p)>| >= 1e-6",
                    Comparison::AtLeast,
                    1e-6,
                    || Ok((row.report.value().norm(), row.report.exact_repr.clone().unwrap_or_default())),
                );
            }
            if quad.is_some() {
                ctx.check(
                    rep,
                    "pairing.discrepancy",
                    "all table rows",
                    "|exact - quadrature|",
                    Comparison::AtMost,
                    tol,
                    || Ok((rows.iter().filter_map(|r| r.report.discrepancy).fold(0.0, f64::max), String::new())),
                );
            }
            rep.table.extend(rows.iter().map(row_to_table));
        }
        Err(e) => ctx.check(rep, "pairing.annihilator", "", "table builds", Comparison::Exact, 0.0, || Err(e)),
    }

    let mut rng = ctx.rng(41);
    let pairs: Vec<(KelvinFunction, KelvinFunction)> =
        (0..20).map(|_| (random_holomorphic(n, 3, &mut rng), random_admissible(n, 3, &mut rng))).collect();
    let radii: Vec<f64> = [0.6, 0.8, 0.95].iter().map(|t| t * r).collect();
    let contour: Vec<_> = pairs.iter().map(|(u, v)| contour_independence(u, v, &radii, quad.as_ref())).collect();
    ctx.check(
        rep,
        "pairing.contour.exact",
        "20 random pairs, radii 0.6R 0.8R 0.95R",
        "max deviation",
        Comparison::AtMost,
        1e-10,
        || {
            let mut worst: f64 = 0.0;
            for c in &contour {
                let c = c.as_ref().map_err(Clone::clone)?;
                worst = worst.max(if c.radius_independent { c.exact_deviation } else { f64::INFINITY });
            }
            Ok((worst, String::new()))
        },
    );
    if quad.is_some() {
        ctx.check(
            rep,
            "pairing.contour.quadrature",
            "20 random pairs, radii 0.6R 0.8R 0.95R",
            "max deviation",
            Comparison::AtMost,
            tol,
            || {
                let mut worst: f64 = 0.0;
                for c in &contour {
                    worst = worst.max(c.as_ref().map_err(Clone::clone)?.quadrature_deviation.unwrap_or(f64::INFINITY));
                }
                Ok((worst, String::new()))
            },
        );
    }
    ctx.check(rep, "pairing.sesquilinear", "10 random triples", "0 violations (exact)", Comparison::Exact, 0.0, || {
        let mut bad = 0;
        for k in 0..10i64 {
            let u1 = random_holomorphic(n, 2, &mut rng);
            let u2 = random_holomorphic(n, 2, &mut rng);
            let v = random_admissible(n, 2, &mut rng);
            let a = exact_int(k - 4, 3 - k);
            let lhs = paper_pairing_exact(&u1.scale(&a).add(&u2), &v)?;
            let rhs = paper_pairing_exact(&u1, &v)?.scale(&a).add(&paper_pairing_exact(&u2, &v)?);
            bad += usize::from(lhs != rhs);
            let lhs = paper_pairing_exact(&u1, &v.scale(&a))?;
            let rhs = paper_pairing_exact(&u1, &v)?.scale(&a.conj());
            bad += usize::from(lhs != rhs);
        }
        Ok((bad as f64, String::new()))
    });
    ctx.check(rep, "pairing.residue_1d", "n = 1, k, m <= 6", "2 pi i delta(m, k+1)", Comparison::AtMost, 1e-10, || {
        let q1 = SphereQuadrature::build_default(1, r)?;
        let mut worst: f64 = 0.0;
        for k in 0..=6u32 {
            for m in 1..=6u32 {
                let u = KelvinFunction::holomorphic_monomial(MultiIndex::new(vec![k]));
                let h = principal_part(&[(m, exact_int(1, 0))])?;
                let c = cauchy_pairing_1d(&u, &h, r, Some(&q1))?;
                let want = if m == k + 1 { Complex64::new(0.0, 2.0 * PI) } else { Complex64::new(0.0, 0.0) };
                worst = worst.max((c.exact - want).norm()).max((c.quadrature.unwrap_or(want) - want).norm());
            }
        }
        Ok((worst, String::new()))
    });
}

fn ball_example(ctx: &Ctx, rep: &mut SuiteReport) {
    let (n, r) = (ctx.n(), ctx.r());
    let tol = ctx.cfg.tol_pairing;
    let quad = ctx.validator();
    let zero = MultiIndex::zeros(n);
    let mut table = Vec::new();
    let expected = contrast_closed_form(n);
    let scale = expected.norm().max(1.0);
    ctx.check(
        rep,
        "ball.contrast.g0",
        "u = 1, g = dbar |z|^(2-2n)",
        "(1-n) c_n |S^(2n-1)| (4 pi^2 for n = 2)",
        Comparison::AtMost,
        tol,
        || {
            let g = contrast_vector(&zero)?;
            let rp = grothendieck_pairing(&KelvinFunction::one(n), &g, r, quad.as_ref())?;
            table.push(table_row(&zero.to_string(), &format!("g({zero})"), &rp));
            let e = (rp.value() - expected).norm();
            let q = rp.value_quadrature.map(|v| (v - expected).norm()).unwrap_or(0.0);
            Ok((e.max(q) / scale, rp.exact_repr.clone().unwrap_or_default()))
        },
    );
    ctx.check(
        rep,
        "ball.contrast.g00",
        "u = 1, g = dbar(2 |z|^(2-2n))",
        "2 x ball.contrast.g0",
        Comparison::AtMost,
        tol,
        || {
            let g = make_annihilator(&zero, &zero, n)?;
            let rp = grothendieck_pairing(&KelvinFunction::one(n), &g, r, quad.as_ref())?;
            table.push(table_row(&zero.to_string(), &format!("g(0,{zero})"), &rp));
            Ok(((rp.value() - 2.0 * expected).norm() / scale, rp.exact_repr.clone().unwrap_or_default()))
        },
    );
    for p in MultiIndex::all_up_to(n, 3).into_iter().filter(|p| p.order() > 0) {
        ctx.check(
            rep,
            &format!("ball.contrast.p{p}"),
            "",
            "|<z^p, dbar K(z^p)>| >= 1e-6",
            Comparison::AtLeast,
            1e-6,
            || {
                let rp = grothendieck_pairing(&monomial(&p), &contrast_vector(&p)?, r, quad.as_ref())?;
                table.push(table_row(&p.to_string(), &format!("g({p})"), &rp));
                Ok((rp.value().norm(), rp.exact_repr.clone().unwrap_or_default()))
            },
        );
    }
    let q1 = MultiIndex::unit(n, 0);
    ctx.check(
        rep,
        &format!("ball.annihilator.q{q1}"),
        &format!("|s| <= {}", ctx.cfg.s_max),
        "0 nonzero entries (exact)",
        Comparison::Exact,
        0.0,
        || {
            let rows = annihilator_suite(n, std::slice::from_ref(&q1), ctx.cfg.s_max, &[], r, quad.as_ref(), ctx.exec)?;
            let bad = rows.iter().filter(|c| !c.report.exact.as_ref().is_some_and(|e| e.is_zero())).count();
            table.extend(rows.iter().map(row_to_table));
            Ok((bad as f64, format!("{} entries", rows.len())))
        },
    );
    rep.table.extend(table);

    let mut rng = ctx.rng(51);
    let mut vs = vec![
        kelvin_extend(&z(n, 0)).expect("harmonic"),
        kelvin_extend(&KelvinFunction::one(n)).expect("harmonic"),
        KelvinFunction::zero(n),
    ];
    vs.extend((0..10).map(|_| random_admissible(n, 2, &mut rng)));
    ctx.check(
        rep,
        "ball.energy.identity",
        "K(z1), K(1), 0 and 10 random admissible v",
        "<w, v> = -(2i)^n sum ||dbar_j v||^2",
        Comparison::AtMost,
        tol,
        || {
            let mut worst: f64 = 0.0;
            for v in &vs {
                let e = energy_identity_check(v, r, quad.as_ref())?;
                let d = (e.normalized_pairing - e.energy).norm() / e.energy.norm().max(1.0);
                worst = worst.max(if e.identity_holds { d } else { d.max(f64::MIN_POSITIVE) });
                if let Some(qv) = e.pairing_quadrature {
                    worst = worst.max((qv - e.pairing).norm() / e.pairing.norm().max(1.0));
                }
            }
            Ok((worst, String::new()))
        },
    );
    let energy_one = energy_identity_check(&vs[1], r, None);
    ctx.check(
        rep,
        "ball.energy.kelvin_one",
        "v = K(1)",
        "(n-1) pi^n / (n-1)! R^(2-2n)",
        Comparison::AtMost,
        tol,
        || {
            let e = energy_one.as_ref().map_err(Clone::clone)?;
            Ok(((e.energy.re - kelvin_one_energy(n, r)).abs(), e.energy_repr.clone()))
        },
    );
    ctx.check(
        rep,
        "ball.energy.cross_module",
        "h_D(1,1) exterior vs energy of K(1)",
        "equal",
        Comparison::AtMost,
        1e-12,
        || {
            let e = energy_one.as_ref().map_err(Clone::clone)?;
            let h = BallForm::with_degree(n, 0, ctx.radius.clone())?
                .value(&KelvinFunction::one(n), &KelvinFunction::one(n))?;
            Ok(((h.exterior_f64() - e.energy.re).abs(), h.exterior.to_string()))
        },
    );
    ctx.check(
        rep,
        "ball.contour.one",
        "u = 1, v = K(1), radii 0.5R 1.0R",
        "equal values",
        Comparison::AtMost,
        1e-10,
        || {
            let c = contour_independence(&KelvinFunction::one(n), &vs[1], &[0.5 * r, r], None)?;
            Ok((c.exact_deviation, String::new()))
        },
    );
}

fn dirichlet(ctx: &Ctx, rep: &mut SuiteReport) {
    let n = ctx.n();
    let last = n - 1;
    let traces = [
        ("z1*conj(zn)", z(n, 0).mul(&zb(n, last))),
        ("|z1|^2", z(n, 0).mul(&zb(n, 0))),
        ("z1^2*conj(z1)+1", z(n, 0).mul(&z(n, 0)).mul(&zb(n, 0)).add(&KelvinFunction::one(n))),
    ];
    for (name, f) in &traces {
        let family = Arc::new(HarmonicFamily::build(n, polynomial_degree(f)));
        let expansion = BoundaryExpansion::from_trace_exact(f, &ctx.radius, family);
        let same_trace = |g: &KelvinFunction| {
            let d = g.sub(f);
            sphere_inner(&d, &d, &ctx.radius) == exact_int(0, 0)
        };
        ctx.check(
            rep,
            &format!("dirichlet.interior.{name}"),
            "",
            "harmonic, trace matches (exact)",
            Comparison::Exact,
            0.0,
            || {
                let w = expansion.as_ref().map_err(Clone::clone)?.dirichlet_interior();
                let bad = usize::from(!w.is_harmonic()) + usize::from(!same_trace(&w));
                Ok((bad as f64, w.to_string()))
            },
        );
        ctx.check(
            rep,
            &format!("dirichlet.exterior.{name}"),
            "",
            "harmonic, trace matches, decays (exact)",
            Comparison::Exact,
            0.0,
            || {
                let v = expansion.as_ref().map_err(Clone::clone)?.dirichlet_exterior();
                let decay = decay_check(&v)?;
                let bad = usize::from(!v.is_harmonic()) + usize::from(!same_trace(&v)) + usize::from(!decay.pass);
                Ok((bad as f64, format!("value exponent {:.3}", decay.value_exponent)))
            },
        );
    }

    let degree = ctx.cfg.s_max.min(ctx.cfg.r_max).max(1);
    let form = match BallForm::with_degree(n, degree, ctx.radius.clone()) {
        Ok(f) => f,
        Err(e) => {
            ctx.check(rep, "dirichlet.setup", "", "form builds", Comparison::Exact, 0.0, || Err(e));
            return;
        }
    };
    ctx.check(
        rep,
        "dirichlet.form.one",
        "h_D(1, 1)",
        "(n-1) pi^n / (n-1)! R^(2-2n)",
        Comparison::AtMost,
        1e-12,
        || {
            let h = form.value(&KelvinFunction::one(n), &KelvinFunction::one(n))?;
            Ok(((h.total.to_complex().re - kelvin_one_energy(n, ctx.r())).abs(), h.total.to_string()))
        },
    );
    let mut rng = ctx.rng(61);
    let samples: Vec<KelvinFunction> =
        (0..4).map(|k| random_holomorphic(n, 2, &mut rng).add(&zb(n, k % n)).add(&z(n, 0).mul(&zb(n, last)))).collect();
    ctx.check(
        rep,
        "dirichlet.form.hermitian",
        "4 random w",
        "h(a,b) = conj h(b,a), h(a,a) > 0 (exact)",
        Comparison::Exact,
        0.0,
        || {
            let mut bad = 0;
            for a in &samples {
                for b in &samples {
                    let ab = form.value(a, b)?.total;
                    let ba = form.value(b, a)?.total;
                    bad += usize::from(ab != ba.conj());
                }
                let aa = form.value(a, a)?.total.to_complex();
                bad += usize::from(!(aa.re > 0.0 && aa.im == 0.0));
            }
            Ok((bad as f64, String::new()))
        },
    );
    if n == 1 {
        return;
    }
    ctx.check(rep, "dirichlet.projection.conj_z1", "Pi_D conj(z1)", "0 (exact)", Comparison::Exact, 0.0, || {
        let p = form.project_holomorphic(&zb(n, 0))?;
        Ok((p.function.len() as f64, String::new()))
    });
    ctx.check(
        rep,
        "dirichlet.projection.monomials",
        &format!("|s| <= {degree}"),
        "Pi_D z^s = z^s (exact)",
        Comparison::Exact,
        0.0,
        || {
            let mut bad = 0;
            for s in MultiIndex::all_up_to(n, degree) {
                bad += usize::from(!form.project_holomorphic(&monomial(&s))?.function.equals(&monomial(&s)));
            }
            Ok((bad as f64, String::new()))
        },
    );
    let projected: Vec<_> = samples.iter().map(|w| form.project_holomorphic(w)).collect();
    ctx.check(
        rep,
        "dirichlet.projection.idempotent",
        "4 random w",
        "h(P^2 w - P w, same)^(1/2)",
        Comparison::AtMost,
        1e-10,
        || {
            let mut worst: f64 = 0.0;
            for p in &projected {
                let p = &p.as_ref().map_err(Clone::clone)?.function;
                let d = form.project_holomorphic(p)?.function.sub(p);
                worst = worst.max(form.value(&d, &d)?.total.to_complex().norm().sqrt());
            }
            Ok((worst, String::new()))
        },
    );
    ctx.check(
        rep,
        "dirichlet.projection.self_adjoint",
        "4 random w",
        "|h(P a, b) - h(a, P b)|",
        Comparison::AtMost,
        1e-10,
        || {
            let mut worst: f64 = 0.0;
            for (a, pa) in samples.iter().zip(&projected) {
                let pa = &pa.as_ref().map_err(Clone::clone)?.function;
                for (b, pb) in samples.iter().zip(&projected) {
                    let pb = &pb.as_ref().map_err(Clone::clone)?.function;
                    let l = form.value(pa, b)?.total.to_complex();
                    let r = form.value(a, pb)?.total.to_complex();
                    worst = worst.max((l - r).norm());
                }
            }
            Ok((worst, String::new()))
        },
    );
    ctx.check(
        rep,
        "dirichlet.projection.condition",
        "Gram over z^s",
        "pivot ratio",
        Comparison::AtMost,
        form.condition_threshold,
        || {
            let p = projected[0].as_ref().map_err(Clone::clone)?;
            Ok((p.condition_estimate, String::new()))
        },
    );
}

fn density(ctx: &Ctx, rep: &mut SuiteReport) {
    let (n, r) = (ctx.n(), ctx.r());
    let probe = density_probe(n, ctx.cfg.s_max, 50, r, ctx.seed(71), ctx.exec);
    let inputs = format!("50 admissible v, s_max = {}", ctx.cfg.s_max);
    ctx.check(
        rep,
        "density.annihilating",
        &inputs,
        "0 v with f_v = 0 (evidence, not proof)",
        Comparison::Exact,
        0.0,
        || {
            let p = probe.as_ref().map_err(Clone::clone)?;
            Ok((p.annihilating as f64, String::new()))
        },
    );
    ctx.check(
        rep,
        "density.min_coefficient",
        &inputs,
        "min over v of max_s |f_v(z^s)| > 0",
        Comparison::AtLeast,
        f64::MIN_POSITIVE,
        || {
            let p = probe.as_ref().map_err(Clone::clone)?;
            Ok((p.min_max_coefficient, String::new()))
        },
    );
}

fn canonical_name(name: &str) -> Option<&'static str> {
    match name {
        "cr-test" => Some("cr"),
        "density" => Some("density-probe"),
        "all" => Some("all"),
        other => SUITES.iter().copied().find(|s| *s == other),
    }
}

fn run_one(ctx: &Ctx, name: &str) -> SuiteReport {
    let mut rep = SuiteReport::new(name, ctx.environment());
    match name {
        "harmonics" => harmonics(ctx, &mut rep),
        "reproduce" => reproduce(ctx, &mut rep),
        "cr" => cr(ctx, &mut rep),
        "jump" => jump(ctx, &mut rep),
        "pairing" => pairing(ctx, &mut rep),
        "ball-example" => ball_example(ctx, &mut rep),
        "dirichlet" => dirichlet(ctx, &mut rep),
        "density-probe" => density(ctx, &mut rep),
        _ => unreachable!("names are canonicalized"),
    }
    rep
}

/// Runs a suite by name; `all` runs every suite in a fixed order.
pub fn run_suite(name: &str, cfg: &RunConfig) -> Result<SuiteReport, CliError> {
    let suite = canonical_name(name).ok_or_else(|| CliError::UnknownSuite(name.to_string()))?;
    let ctx = Ctx::new(cfg)?;
    let start = Instant::now();
    let mut rep = if suite == "all" {
        let mut all = SuiteReport::new("all", ctx.environment());
        for s in SUITES {
            all.absorb(run_one(&ctx, s));
        }
        all
    } else {
        run_one(&ctx, suite)
    };
    rep.finish();
    rep.wall_time = start.elapsed();
    Ok(rep)
}
