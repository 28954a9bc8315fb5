//! A reduced, seeded run of the invariant suite. Output depends only on the
//! seed: no timings, and every parallel reduction keeps a fixed order.

use crate::elliptic::{
    cusp_mu_decay, first_term, flatparallel_scaling, subsolution_gap, verify_collar_decay, RadialConfig,
};
use crate::error::Result;
use crate::geom::{curvature_at, CylinderChart, DiskChart, ModelSurface, TWO_PI};
use crate::hessian::arc::{hessian_arc, ArcConfig, CuspEnd, TwoCuspArc, DEFAULT_LADDER};
use crate::hessian::{check_two_thirds_inequality, cylinder_family_scan, hessian_closed, HessianConfig};
use crate::jacobi1d::{periodic_residual, second_term_kernel, solve_periodic, solve_periodic_kernel};
use crate::qdiff::{cusp_surface, QdRepr, QuadDiff};
use crate::quad::Quadrature;
use crate::random;
use crate::thurston::thurston_ratio;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn below(name: &'static str, value: f64, limit: f64) -> Check {
    Check { name, pass: value < limit, value, limit }
}

fn above(name: &'static str, value: f64, limit: f64) -> Check {
    Check { name, pass: value > limit, value, limit }
}

pub fn run(seed: u64) -> Result<SelftestReport> {
    let mut rng = random::rng(seed);
    let mut checks = Vec::new();

    // curvature of the three charts
    let mut worst = [0.0f64; 3];
    for _ in 0..20 {
        let chart = CylinderChart::new(rng.gen_range(0.3..2.0))?;
        let x = rng.gen_range(-0.9..0.9) * chart.half_width();
        let k = curvature_at(&ModelSurface::Cylinder(chart), Complex64::new(x, rng.gen_range(0.0..1.0)))?;
        worst[0] = worst[0].max((k + 1.0).abs());
        let z = Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..TWO_PI));
        worst[1] = worst[1].max((curvature_at(&ModelSurface::Disk(DiskChart), z)? + 1.0).abs());
        let z = Complex64::from_polar(rng.gen_range(0.15..0.9), rng.gen_range(0.0..TWO_PI));
        worst[2] = worst[2].max((curvature_at(&cusp_surface(), z)? + 1.0).abs());
    }
    checks.push(below("curvature-cylinder", worst[0], 1e-5));
    checks.push(below("curvature-disk", worst[1], 1e-5));
    checks.push(below("curvature-cusp", worst[2], 1e-5));

    // circle solvers
    let quad = Quadrature::default();
    let (mut residual, mut backends, mut three_way) = (0.0f64, 0.0f64, 0.0f64);
    for &l in &[0.5, 1.0, 2.0, 8.0] {
        for _ in 0..3 {
            let f = random::trig_field(&mut rng, l, 4, 128)?;
            let sol = solve_periodic(&f)?;
            residual = residual.max(periodic_residual(&sol.u, &f)? / f.max_abs());
            let ker = solve_periodic_kernel(&f, &quad)?;
            let diff = sol.u.values().iter().zip(ker.u.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            backends = backends.max(diff / sol.u.max_abs());
            let uf = sol.u.product_integral(&f)?;
            let k = second_term_kernel(&f, &quad)?;
            let scale = sol.energy.abs().max(1e-300);
            three_way = three_way.max(((sol.energy - uf).abs().max((sol.energy - k).abs())) / scale);
        }
    }
    checks.push(below("jacobi-green-residual", residual, 1e-6));
    checks.push(below("jacobi-backend-agreement", backends, 1e-8));
    checks.push(below("jacobi-three-way-second-term", three_way, 1e-7));

    // closed Hessians
    let cfg = HessianConfig::default();
    let (mut violations, mut two_thirds, mut min_total) = (0usize, 0usize, f64::INFINITY);
    for _ in 0..6 {
        let ell = rng.gen_range(0.4..1.6);
        let phi = random::fourier_differential(&mut rng, ell, 2, false)?;
        let rep = hessian_closed(&phi, None, &cfg)?;
        violations += rep.violations().len();
        two_thirds += usize::from(!check_two_thirds_inequality(&rep, ell));
        min_total = min_total.min(rep.total);
    }
    checks.push(below("hessian-report-violations", violations as f64, 0.5));
    checks.push(below("hessian-two-thirds-failures", two_thirds as f64, 0.5));
    checks.push(above("hessian-min-total", min_total, 0.0));
    let c = Complex64::new(0.6, 0.8);
    let ft = first_term(&QuadDiff::constant(ModelSurface::cylinder(0.8)?, c), &RadialConfig::default())?;
    checks.push(below("elliptic-constant-first-term", (ft - 1.0 / (2.0 * 0.8f64.powi(3))).abs(), 1e-8));

    let scan = cylinder_family_scan(0.25, 4.0, 16, &cfg)?;
    let sharp = scan.rows.iter().map(|r| r.d2_sqrt_l.abs()).fold(0.0, f64::max);
    let formula = scan.rows.iter().map(|r| ((r.d2l_ds2 - r.formula_hess) / r.formula_hess).abs()).fold(0.0, f64::max);
    checks.push(below("family-half-power-sharpness", sharp, 1e-6));
    checks.push(below("family-formula-vs-differences", formula, 1e-3));
    checks.push(above("family-quadratic-fit-r2", scan.kappa_r_squared, 1.0 - 1e-8));

    // surface-side inequalities
    let cyl = random::fourier_differential(&mut rng, 1.0, 0, false)?;
    let chart = CylinderChart::new(1.0)?;
    let pts: Vec<Complex64> = (0..400)
        .map(|_| Complex64::new(rng.gen_range(-0.9..0.9) * chart.half_width(), rng.gen_range(0.0..1.0)))
        .collect();
    let mut gap = subsolution_gap(&cyl, &pts, 1e-4).min_gap;
    let disk = QuadDiff::new(
        ModelSurface::Disk(DiskChart),
        QdRepr::DiskPolynomial(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]),
    )?;
    let pts: Vec<Complex64> =
        (0..400).map(|_| Complex64::from_polar(rng.gen_range(0.1..0.9), rng.gen_range(0.0..TWO_PI))).collect();
    gap = gap.min(subsolution_gap(&disk, &pts, 1e-4).min_gap);
    checks.push(above("elliptic-subsolution-gap", gap, -1e-6));

    let collar = CylinderChart::new(0.3)?;
    let phi = random::fourier_differential(&mut rng, 0.3, 3, true)?;
    let decay = verify_collar_decay(&phi, &collar, 201)?;
    checks.push(below("elliptic-collar-decay-ratio", decay.worst_ratio, 1.0 + 1e-9));
    let sc = flatparallel_scaling(&[0.4, 0.2, 0.1, 0.05, 0.025], 1.0, &RadialConfig::default())?;
    checks.push(below("elliptic-scaling-u0-slope-error", (sc.slope_u0.slope - 1.0).abs(), 0.15));
    checks.push(below("elliptic-scaling-integral-slope-error", (sc.slope_core_integral.slope - 2.0).abs(), 0.15));
    checks.push(below("elliptic-particular-ratio-slope", sc.slope_particular_ratio.slope, -2.0));

    // arcs and cusps
    let end = |c: Complex64, theta: f64| -> Result<CuspEnd> {
        CuspEnd::new(QuadDiff::new(cusp_surface(), QdRepr::CuspPrincipal { c, tail: vec![] })?, theta)
    };
    let ca = Complex64::new(rng.gen_range(0.5..1.5), rng.gen_range(-1.0..1.0));
    let cb = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.5..1.5));
    let arc = TwoCuspArc::new(end(ca, rng.gen_range(0.0..TWO_PI))?, end(cb, rng.gen_range(0.0..TWO_PI))?);
    let rep = hessian_arc(&arc, &DEFAULT_LADDER, &ArcConfig::default())?;
    let tail_cauchy = rep.cauchy[4..].iter().copied().fold(0.0, f64::max);
    checks.push(below("arc-cauchy-beyond-30", tail_cauchy, 1e-4));
    checks.push(above("arc-boundary-decay-rate", rep.rate_a.unwrap_or(0.0).min(rep.rate_b.unwrap_or(0.0)), 0.4));
    let last = rep.rungs.last().expect("ladder is nonempty");
    checks.push(below("arc-line-kernel-gap", (last.energy - rep.line_energy).abs(), 1e-4));
    let mu = cusp_mu_decay(arc.right.phi(), &[0.01, 0.05, 0.2, 0.5])?;
    checks.push(below("cusp-mu-decay-equality", (mu - cb.norm()).abs(), 1e-12));

    let ratio = thurston_ratio(&random::disk_polynomial(&mut rng, 3)?, Complex64::new(0.0, 0.0))?;
    checks.push(below("thurston-ratio-error", (ratio.ratio - 4.0 / 3.0).abs(), 1e-4));

    Ok(SelftestReport { seed, checks })
}
