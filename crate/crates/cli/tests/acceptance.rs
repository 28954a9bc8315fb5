//! Acceptance suite: ten criteria, one pass/fail line each.

use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};
use wph_core::elliptic::{cusp_mu_decay, flatparallel_scaling, subsolution_gap, verify_collar_decay, RadialConfig};
use wph_core::geom::{curvature_at, CylinderChart, DiskChart, ModelSurface};
use wph_core::hessian::arc::{hessian_arc, ArcConfig, CuspEnd, TwoCuspArc, DEFAULT_LADDER};
use wph_core::hessian::{cylinder_family_scan, hessian_closed, sup_norm_sq, HessianConfig};
use wph_core::jacobi1d::{periodic_residual, second_term_kernel, solve_periodic, GreenKernel};
use wph_core::qdiff::{cusp_surface, QdRepr, QuadDiff};
use wph_core::quad::Quadrature;
use wph_core::random;
use wph_core::thurston::{
    flow_correlation_i2, half_angle_average, radial_constant, thurston_ratio, FlowCorrelation, DEFAULT_T_MAX,
};

const SEED: u64 = 20240611;

type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
const CIRCLES: [f64; 4] = [0.5, 1.0, 2.0, 8.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn curvature() -> Outcome {
    let mut rng = random::rng(SEED);
    let chart = CylinderChart::new(0.8).unwrap();
    let surfaces = [ModelSurface::Cylinder(chart), ModelSurface::Disk(DiskChart), cusp_surface()];
    let mut worst = [0.0f64; 3];
    for (k, s) in surfaces.iter().enumerate() {
        for _ in 0..100 {
            let z = match k {
                0 => c(rng.gen_range(-0.9..0.9) * chart.half_width(), rng.gen_range(0.0..1.0)),
                1 => Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..2.0 * PI)),
                _ => Complex64::from_polar(rng.gen_range(0.15..0.9), rng.gen_range(0.0..2.0 * PI)),
            };
            worst[k] = worst[k].max((curvature_at(s, z).unwrap() + 1.0).abs());
        }
    }
    let pass = worst.iter().all(|w| *w <= 1e-5);
    outcome(pass, format!("max |K + 1| cylinder {:.1e}, disk {:.1e}, cusp {:.1e}", worst[0], worst[1], worst[2]))
}

fn greens_kernels() -> Outcome {
    let mut rng = random::rng(SEED + 2);
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let l = CIRCLES[i % 4];
        let f = random::trig_field(&mut rng, l, 4, 128).unwrap();
        let sol = solve_periodic(&f).unwrap();
        worst = worst.max(periodic_residual(&sol.u, &f).unwrap() / f.max_abs());
    }
    let mut seg_ok = true;
    let mut worst_margin: f64 = 0.0;
    for &l in &[4.0, 8.0, 16.0, 32.0, 64.0] {
        for _ in 0..200 {
            let (y, s) = (rng.gen_range(-0.45..0.45) * l, rng.gen_range(-0.45..0.45) * l);
            let err = (GreenKernel::Segment { length: l }.eval(y, s) - GreenKernel::Line.eval(y, s)).abs();
            let bound = (-(0.5 * l - y.abs().max(s.abs()))).exp();
            seg_ok &= err < bound;
            worst_margin = worst_margin.max(err / bound);
        }
    }
    outcome(
        worst < 1e-6 && seg_ok,
        format!("residual/‖F‖ {worst:.1e} (< 1e-6); segment-line error/bound ≤ {worst_margin:.3}"),
    )
}

fn three_way() -> Outcome {
    let mut rng = random::rng(SEED + 3);
    let quad = Quadrature::default();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let f = random::trig_field(&mut rng, CIRCLES[i % 4], 4, 128).unwrap();
        let sol = solve_periodic(&f).unwrap();
        let uf = sol.u.product_integral(&f).unwrap();
        let k = second_term_kernel(&f, &quad).unwrap();
        let rel = [(sol.energy - uf).abs(), (sol.energy - k).abs(), (uf - k).abs()]
            .iter()
            .fold(0.0f64, |m, d| m.max(d / sol.energy.abs()));
        worst = worst.max(rel);
    }
    outcome(worst < 1e-7, format!("max pairwise relative difference {worst:.1e} (< 1e-7)"))
}

fn sandwich() -> Outcome {
    let mut rng = random::rng(SEED + 4);
    let cfg = HessianConfig::default();
    let (mut violations, mut min_total, mut min_margin) = (0usize, f64::INFINITY, f64::INFINITY);
    for _ in 0..100 {
        let ell = rng.gen_range(0.2..2.0);
        let modes = rng.gen_range(0..=3);
        let phi = random::fourier_differential(&mut rng, ell, modes, false).unwrap();
        let rep = hessian_closed(&phi, None, &cfg).unwrap();
        violations += rep.violations().len() + usize::from(rep.total.is_nan() || rep.total <= 0.0);
        min_total = min_total.min(rep.total);
        min_margin = min_margin.min((rep.total - rep.lower_bound_third).min(rep.upper_bound - rep.total) / rep.total);
    }
    outcome(
        violations == 0,
        format!("100 differentials, {violations} violations, min total {min_total:.3e}, min relative margin {min_margin:.3e}"),
    )
}

fn family() -> Outcome {
    let scan = cylinder_family_scan(0.25, 4.0, 64, &HessianConfig::default()).unwrap();
    let sharp = scan.rows.iter().map(|r| r.d2_sqrt_l.abs()).fold(0.0, f64::max);
    let convex = scan.rows.iter().map(|r| r.d2_l23).fold(f64::INFINITY, f64::min);
    let formula = scan.rows.iter().map(|r| ((r.d2l_ds2 - r.formula_hess) / r.formula_hess).abs()).fold(0.0, f64::max);
    let pass = scan.kappa_r_squared > 1.0 - 1e-8 && sharp < 1e-6 && convex > 0.0 && formula < 1e-3;
    outcome(
        pass,
        format!(
            "R² = 1 − {:.1e}, max |d²√ℓ| {sharp:.1e}, min d²ℓ^(2/3) {convex:.3e}, formula gap {formula:.1e}; \
             κ = {:.9} (1/2π = {:.9}), ℓ‖∂ℓ‖² ∈ [{:.9}, {:.9}]",
            1.0 - scan.kappa_r_squared,
            scan.kappa,
            1.0 / (2.0 * PI),
            scan.norm_sq_times_ell.0,
            scan.norm_sq_times_ell.1
        ),
    )
}

fn subsolution() -> Outcome {
    let mut rng = random::rng(SEED + 6);
    let mut min_gap = f64::INFINITY;
    let mut evaluated = 0;
    for k in 0..10 {
        let (phi, pts) = if k < 5 {
            let ell = rng.gen_range(0.3..1.5);
            let raw = random::fourier_differential(&mut rng, ell, 2, false).unwrap();
            let phi = raw.scaled(c(1.0 / sup_norm_sq(&raw).unwrap().sqrt(), 0.0));
            let hw = PI / (2.0 * ell);
            let pts: Vec<Complex64> =
                (0..10_000).map(|_| c(rng.gen_range(-0.9..0.9) * hw, rng.gen_range(0.0..1.0))).collect();
            (phi, pts)
        } else {
            let raw = random::disk_polynomial(&mut rng, 3).unwrap();
            let sup = (0..4000)
                .map(|j| {
                    raw.norm_sq(Complex64::from_polar(
                        0.95 * (j % 40) as f64 / 39.0,
                        2.0 * PI * (j / 40) as f64 / 100.0,
                    ))
                })
                .fold(0.0, f64::max);
            let phi = raw.scaled(c(1.0 / sup.sqrt(), 0.0));
            let pts: Vec<Complex64> = (0..10_000)
                .map(|_| Complex64::from_polar(rng.gen_range(0.0..0.9), rng.gen_range(0.0..2.0 * PI)))
                .collect();
            (phi, pts)
        };
        // skip only near-zeros of Φ
        let gap = subsolution_gap(&phi, &pts, 1e-9);
        min_gap = min_gap.min(gap.min_gap);
        evaluated += gap.evaluated;
    }
    outcome(min_gap >= -1e-6, format!("min Δv + 4v = {min_gap:.3e} over {evaluated} samples (≥ −1e-6)"))
}

fn collar() -> Outcome {
    let mut rng = random::rng(SEED + 7);
    let mut worst: f64 = 0.0;
    let mut all = true;
    for _ in 0..20 {
        let ell = rng.gen_range(0.05..0.8);
        let phi = random::fourier_differential(&mut rng, ell, 3, true).unwrap();
        let check = verify_collar_decay(&phi, &CylinderChart::new(ell).unwrap(), 201).unwrap();
        all &= check.holds;
        worst = worst.max(check.worst_ratio);
    }
    let sc = flatparallel_scaling(&[0.4, 0.2, 0.1, 0.05, 0.025], 1.0, &RadialConfig::default()).unwrap();
    let (a, b) = (sc.slope_u0.slope, sc.slope_core_integral.slope);
    let pass = all && (a - 1.0).abs() <= 0.15 && (b - 2.0).abs() <= 0.15;
    outcome(pass, format!("decay worst ratio {worst:.6} (≤ 1), slopes u(0) {a:.4}, integral {b:.4}"))
}

fn arc() -> Outcome {
    let mut rng = random::rng(SEED + 8);
    let mut pass = true;
    let mut notes = Vec::new();
    for _ in 0..2 {
        let mut end = || {
            let k = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let phi = QuadDiff::new(cusp_surface(), QdRepr::CuspPrincipal { c: k, tail: vec![] }).unwrap();
            CuspEnd::new(phi, rng.gen_range(0.0..2.0 * PI)).unwrap()
        };
        let arc = TwoCuspArc::new(end(), end());
        let rep = hessian_arc(&arc, &DEFAULT_LADDER, &ArcConfig::default()).unwrap();
        let tail = rep
            .cauchy
            .iter()
            .enumerate()
            .filter(|(k, _)| rep.rungs[*k].length >= 30.0)
            .map(|(_, d)| *d)
            .fold(0.0, f64::max);
        let gap = (rep.rungs.last().unwrap().energy - rep.line_energy).abs();
        let rate = rep.rate_a.unwrap_or(f64::INFINITY).min(rep.rate_b.unwrap_or(f64::INFINITY));
        pass &= tail < 1e-4 && gap < 1e-4 && rate >= 0.4;
        notes.push(format!("Cauchy {tail:.1e}, line gap {gap:.1e}, rate {rate:.3}"));
    }
    let k = c(0.7, -1.3);
    let mu = cusp_mu_decay(
        &QuadDiff::new(cusp_surface(), QdRepr::CuspPrincipal { c: k, tail: vec![] }).unwrap(),
        &[1e-6, 1e-3, 0.05, 0.3, 0.8],
    )
    .unwrap();
    let mu_err = (mu - k.norm()).abs();
    pass &= mu_err < 1e-12;
    outcome(pass, format!("{}; ‖μ‖/(r log²) − |c| = {mu_err:.1e}", notes.join("; ")))
}

fn thurston() -> Outcome {
    let mut rng = random::rng(SEED + 9);
    let mut half: f64 = 0.0;
    for _ in 0..50 {
        let a = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        half = half.max((half_angle_average(a, b, 64) - (a * b.conj()).re / 2.0).abs());
    }
    let radial = (radial_constant() - 2.0 / 3.0).abs();
    let disk = ModelSurface::Disk(DiskChart);
    let constant = QuadDiff::new(disk, QdRepr::DiskPolynomial(vec![c(0.8, -0.6)])).unwrap();
    let cubic = random::disk_polynomial(&mut rng, 3).unwrap();
    let mut pointwise: f64 = 0.0;
    let mut ratio_err: f64 = 0.0;
    for phi in [&constant, &cubic] {
        for p in [c(0.0, 0.0), c(0.3, -0.2), c(-0.5, 0.4)] {
            let fc = FlowCorrelation { t_max: DEFAULT_T_MAX, ..FlowCorrelation::new(phi.clone(), p) };
            let n = phi.norm_sq(p);
            pointwise = pointwise.max((flow_correlation_i2(&fc).unwrap() - n / 3.0).abs() / n);
            ratio_err = ratio_err.max((thurston_ratio(phi, p).unwrap().ratio - 4.0 / 3.0).abs());
        }
    }
    let pass = half < 1e-12 && radial < 1e-12 && pointwise < 1e-5 && ratio_err < 1e-4;
    outcome(
        pass,
        format!(
            "half-angle {half:.1e}, radial {radial:.1e}, I₂ vs ‖Φ‖²/3 {pointwise:.1e}, ratio − 4/3 {ratio_err:.1e}"
        ),
    )
}

fn determinism() -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_wph")).args(["selftest", "--seed", "7"]).output().unwrap();
        (out.status.code(), out.stdout)
    };
    let (a, b) = (run(), run());
    let pass = a.0 == Some(0) && a == b && !a.1.is_empty();
    outcome(pass, format!("two selftest runs, exit {:?}, {} bytes, identical: {}", a.0, a.1.len(), a == b))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 curvature", curvature, Some(Duration::from_secs(1))),
        ("2 green's kernels", greens_kernels, Some(Duration::from_secs(5))),
        ("3 three-way second term", three_way, None),
        ("4 positivity and sandwich", sandwich, Some(Duration::from_secs(30))),
        ("5 cylinder family", family, None),
        ("6 subsolution", subsolution, None),
        ("7 collar decay and scaling", collar, Some(Duration::from_secs(10))),
        ("8 arc regularization", arc, None),
        ("9 thurston constants", thurston, Some(Duration::from_secs(30))),
        ("10 determinism", determinism, None),
    ];
    let mut failed = Vec::new();
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let pass = out.pass && in_time;
        let budget = limit.map_or(String::new(), |l| format!(" / {:.0}s", l.as_secs_f64()));
        println!(
            "[{}] {name}: {} ({:.2}s{budget})",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
        if !pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
