//! The surface-side term: (Δ_g − 2)u = −2‖Φ‖² reduced to an ODE in x on
//! the cylinder, the differential inequality behind the 1/3 lower bound,
//! collar decay of zero-period differentials, the collar boundary-value
//! scaling ladder, and the cusp decay of μ.
//!
//! On the cylinder the reduced equation is `u'' − 2ℓ² sec²(ℓx) u = rhs(x)`.
//! Internally it is solved in θ = ℓx, where it reads
//! `u_θθ − 2 sec²θ u = rhs/ℓ²`.

use crate::error::{Result, WphError};
use crate::fit::{loglog_fit, LineFit};
use crate::geom::{CylinderChart, ModelSurface, TWO_PI};
use crate::qdiff::{QdRepr, QuadDiff};
use crate::quad::{GaussLegendre, Quadrature};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};

/// Smallest allowed gap π/2 − ℓX before the sec² coefficient is too stiff.
pub const MIN_END_GAP: f64 = 1e-6;

/// √8·π, the decay rate of zero-period differentials across a collar.
pub const COLLAR_RATE: f64 = 2.0 * std::f64::consts::SQRT_2 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RadialBc {
    /// u(−X) = .0, u(X) = .1
    Dirichlet(f64, f64),
    /// Bounded on the whole annulus.
    Bounded,
}

#[derive(Debug, Clone)]
pub struct RadialConfig {
    /// Intervals of the coarse grid; Richardson uses this and twice this.
    pub intervals: usize,
    /// Distance in θ from ±π/2 where the bounded solve is cut off.
    pub end_margin: f64,
    /// Dirichlet half-width X; defaults to the collar half-width.
    pub half_width: Option<f64>,
}

impl Default for RadialConfig {
    fn default() -> Self {
        Self { intervals: 8192, end_margin: 1e-5, half_width: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub ell: f64,
    pub half_width: f64,
    pub bc: RadialBc,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    /// Change of u(0) under grid refinement (Dirichlet) or under halving
    /// the end margin (bounded).
    pub sensitivity: f64,
}

impl RadialProfile {
    pub fn center(&self) -> f64 {
        self.u[self.u.len() / 2]
    }

    /// Cubic interpolation between grid nodes.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.x.len();
        let h = self.x[1] - self.x[0];
        let t = (x - self.x[0]) / h;
        let i = (t.floor() as isize).clamp(1, n as isize - 3) as usize;
        let s = t - i as f64;
        let (p0, p1, p2, p3) = (self.u[i - 1], self.u[i], self.u[i + 1], self.u[i + 2]);
        p0 * (-s * (s - 1.0) * (s - 2.0) / 6.0)
            + p1 * ((s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0)
            + p2 * (-(s + 1.0) * s * (s - 2.0) / 2.0)
            + p3 * ((s + 1.0) * s * (s - 1.0) / 6.0)
    }

    /// max |u'' − 2g u − rhs| / ‖rhs‖_∞ over interior nodes with cos(ℓx) ≥ `min_cos`,
    /// u'' by a five-point difference.
    pub fn residual(&self, rhs: &dyn Fn(f64) -> f64, min_cos: f64) -> f64 {
        let h = self.x[1] - self.x[0];
        let ell = self.ell;
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 2..self.x.len() - 2 {
            let x = self.x[i];
            let c = (ell * x).cos();
            if c < min_cos {
                continue;
            }
            let u = &self.u;
            let d2 = (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2]) / (12.0 * h * h);
            let g = ell * ell / (c * c);
            let r = rhs(x);
            scale = scale.max(r.abs());
            worst = worst.max((d2 - 2.0 * g * u[i] - r).abs());
        }
        if scale == 0.0 {
            worst
        } else {
            worst / scale
        }
    }
}

/// u₁ = tan(ℓx), u₂ = x tan(ℓx) + 1/ℓ; their Wronskian u₁u₂' − u₁'u₂ is −1.
pub fn homogeneous_solutions(ell: f64, x: f64) -> (f64, f64) {
    let t = (ell * x).tan();
    (t, x * t + 1.0 / ell)
}

/// 1 − ε cot ε, accurate for small ε.
fn one_minus_cot(e: f64) -> f64 {
    if e.abs() < 1e-2 {
        let e2 = e * e;
        e2 / 3.0 + e2 * e2 / 45.0 + 2.0 * e2 * e2 * e2 / 945.0
    } else {
        1.0 - e / e.tan()
    }
}

/// Homogeneous solutions in θ recessive at θ = π/2 (`plus`) and θ = −π/2 (`minus`).
fn recessive_plus(theta: f64) -> f64 {
    one_minus_cot(FRAC_PI_2 - theta)
}

fn recessive_minus(theta: f64) -> f64 {
    one_minus_cot(FRAC_PI_2 + theta)
}

fn dirichlet_half_width(chart: &CylinderChart, cfg: &RadialConfig) -> Result<f64> {
    let x = match cfg.half_width {
        Some(x) => x,
        None => chart
            .collar_half_width()
            .ok_or_else(|| WphError::Input("no collar for ℓ ≥ 1; pass an explicit half-width".into()))?,
    };
    if !(x > 0.0) {
        return Err(WphError::Input("half-width must be positive".into()));
    }
    if FRAC_PI_2 - chart.ell() * x < MIN_END_GAP {
        return Err(WphError::Conditioning(format!(
            "half-width {x} is within {MIN_END_GAP} (in ℓx) of the chart edge {}; shrink the domain",
            chart.half_width()
        )));
    }
    Ok(x)
}

/// Three-point finite differences on a uniform θ grid, Thomas algorithm.
fn fd_solve(ell: f64, rhs: &dyn Fn(f64) -> f64, theta_max: f64, n: usize, ends: (f64, f64)) -> Vec<f64> {
    let h = 2.0 * theta_max / n as f64;
    let h2 = h * h;
    let m = n - 1;
    let mut diag = vec![0.0; m];
    let mut b = vec![0.0; m];
    for i in 0..m {
        let th = -theta_max + h * (i + 1) as f64;
        let c = th.cos();
        diag[i] = -2.0 / h2 - 2.0 / (c * c);
        b[i] = rhs(th / ell) / (ell * ell);
    }
    b[0] -= ends.0 / h2;
    b[m - 1] -= ends.1 / h2;
    let off = 1.0 / h2;
    // forward sweep
    let mut cp = vec![0.0; m];
    let mut dp = vec![0.0; m];
    cp[0] = off / diag[0];
    dp[0] = b[0] / diag[0];
    for i in 1..m {
        let den = diag[i] - off * cp[i - 1];
        cp[i] = off / den;
        dp[i] = (b[i] - off * dp[i - 1]) / den;
    }
    let mut u = vec![0.0; n + 1];
    u[0] = ends.0;
    u[n] = ends.1;
    u[m] = dp[m - 1];
    for i in (0..m - 1).rev() {
        u[i + 1] = dp[i] - cp[i] * u[i + 2];
    }
    u
}

/// Richardson-combined solve on N and 2N intervals, values on the N grid.
fn fd_richardson(ell: f64, rhs: &dyn Fn(f64) -> f64, theta_max: f64, n: usize, ends: (f64, f64)) -> (Vec<f64>, f64) {
    let coarse = fd_solve(ell, rhs, theta_max, n, ends);
    let fine = fd_solve(ell, rhs, theta_max, 2 * n, ends);
    let u: Vec<f64> = (0..=n).map(|i| (4.0 * fine[2 * i] - coarse[i]) / 3.0).collect();
    let change = (u[n / 2] - coarse[n / 2]).abs();
    (u, change)
}

/// Finite-difference solution of u'' − 2ℓ² sec²(ℓx) u = rhs(x).
///
/// `Bounded` is realised as Dirichlet data −rhs/(2g) (the maximum-principle
/// cap) at θ = ±(π/2 − margin); the solve is repeated with half the margin
/// and the change of u(0) is reported as `sensitivity`.
pub fn solve_rotational(
    chart: &CylinderChart,
    rhs: &dyn Fn(f64) -> f64,
    bc: RadialBc,
    cfg: &RadialConfig,
) -> Result<RadialProfile> {
    let ell = chart.ell();
    let n = (cfg.intervals.max(16) + 1) & !1;
    match bc {
        RadialBc::Dirichlet(a, b) => {
            if !a.is_finite() || !b.is_finite() {
                return Err(WphError::Input("Dirichlet values must be finite".into()));
            }
            let x_max = dirichlet_half_width(chart, cfg)?;
            let (u, change) = fd_richardson(ell, rhs, ell * x_max, n, (a, b));
            Ok(RadialProfile { ell, half_width: x_max, bc, x: grid(x_max, n), u, sensitivity: change })
        }
        RadialBc::Bounded => {
            let margin = cfg.end_margin;
            if !(MIN_END_GAP..0.5).contains(&margin) {
                return Err(WphError::Conditioning(format!("end margin {margin} must lie in [{MIN_END_GAP}, 0.5)")));
            }
            let solve = |m: f64| {
                let th = FRAC_PI_2 - m;
                let x_max = th / ell;
                let cap = |x: f64| -rhs(x) / (2.0 * chart.density(x));
                let (u, _) = fd_richardson(ell, rhs, th, n, (cap(-x_max), cap(x_max)));
                (x_max, u)
            };
            let (x_max, u) = solve(margin);
            let (_, u_half) = if 0.5 * margin >= MIN_END_GAP { solve(0.5 * margin) } else { (x_max, u.clone()) };
            let sensitivity = (u[n / 2] - u_half[n / 2]).abs();
            Ok(RadialProfile { ell, half_width: x_max, bc, x: grid(x_max, n), u, sensitivity })
        }
    }
}

fn grid(x_max: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * x_max / n as f64;
    (0..=n).map(|i| -x_max + h * i as f64).collect()
}

/// Variation-of-parameters solution evaluated at the points `at`.
///
/// Dirichlet: u = u₁∫₀^x u₂ f − u₂∫₀^x u₁ f + c₁u₁ + c₂u₂ with (c₁, c₂) fitted
/// to the boundary data. Bounded: the Green's function built from the two
/// solutions recessive at θ = ±π/2, integrated on panels graded toward the ends.
pub fn variation_of_parameters(
    chart: &CylinderChart,
    rhs: &dyn Fn(f64) -> f64,
    bc: RadialBc,
    cfg: &RadialConfig,
    at: &[f64],
) -> Result<Vec<f64>> {
    let ell = chart.ell();
    let gl = GaussLegendre::new(20);
    match bc {
        RadialBc::Dirichlet(a, b) => {
            let x_max = dirichlet_half_width(chart, cfg)?;
            let q = Quadrature::new(20, 64.0, 64);
            let particular = |x: f64| {
                let i2 = q.integrate(0.0, x, |t| homogeneous_solutions(ell, t).1 * rhs(t));
                let i1 = q.integrate(0.0, x, |t| homogeneous_solutions(ell, t).0 * rhs(t));
                let (u1, u2) = homogeneous_solutions(ell, x);
                u1 * i2 - u2 * i1
            };
            let (pl, pr) = (particular(-x_max), particular(x_max));
            let (u1x, u2x) = homogeneous_solutions(ell, x_max);
            let c1 = ((b - a) - (pr - pl)) / (2.0 * u1x);
            let c2 = ((b + a) - (pr + pl)) / (2.0 * u2x);
            Ok(at
                .iter()
                .map(|&x| {
                    let (u1, u2) = homogeneous_solutions(ell, x);
                    particular(x) + c1 * u1 + c2 * u2
                })
                .collect())
        }
        RadialBc::Bounded => {
            let f = |th: f64| rhs(th / ell) / (ell * ell);
            Ok(at
                .iter()
                .map(|&x| {
                    let th = ell * x;
                    let left = graded(&gl, -FRAC_PI_2, th, true, false, |t| recessive_minus(t) * f(t));
                    let right = graded(&gl, th, FRAC_PI_2, false, true, |t| recessive_plus(t) * f(t));
                    (recessive_plus(th) * left + recessive_minus(th) * right) / -PI
                })
                .collect())
        }
    }
}

/// Gauss–Legendre on [a, b] with geometric refinement toward the flagged ends.
fn graded(gl: &GaussLegendre, a: f64, b: f64, grade_a: bool, grade_b: bool, mut f: impl FnMut(f64) -> f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let len = b - a;
    let mut cuts = vec![a, b];
    for k in 1..48 {
        let d = len * 0.5f64.powi(k);
        if grade_a {
            cuts.push(a + d);
        }
        if grade_b {
            cuts.push(b - d);
        }
    }
    let uniform = (len / 0.05).ceil() as usize;
    for k in 1..uniform {
        cuts.push(a + len * k as f64 / uniform as f64);
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite cut"));
    cuts.dedup();
    cuts.windows(2).map(|w| gl.integrate(w[0], w[1], &mut f)).sum()
}

fn cylinder_of(phi: &QuadDiff) -> Result<CylinderChart> {
    match phi.surface() {
        ModelSurface::Cylinder(c) => Ok(*c),
        s => Err(WphError::Input(format!("first term needs a cylinder differential, got {}", s.name()))),
    }
}

/// y-averaged right-hand side −2 m(x)/g(x), m = ∫₀¹|φ|² dy.
fn mean_rhs(phi: &QuadDiff) -> Result<impl Fn(f64) -> f64 + '_> {
    let chart = cylinder_of(phi)?;
    match phi.repr() {
        QdRepr::Constant(_) | QdRepr::CylinderFourier(_) => {}
        _ => return Err(WphError::Input("first term needs a constant or Fourier differential".into())),
    }
    Ok(move |x: f64| -2.0 * phi.line_mean_sq(x).expect("cylinder repr") / chart.density(x))
}

/// Bounded radial solve of (Δ − 2)u₀ = −2‖Φ‖², y-averaged.
pub fn first_term_profile(phi: &QuadDiff, cfg: &RadialConfig) -> Result<RadialProfile> {
    let chart = cylinder_of(phi)?;
    let rhs = mean_rhs(phi)?;
    solve_rotational(&chart, &rhs, RadialBc::Bounded, cfg)
}

/// ∫ over the core circle of −2(Δ − 2)⁻¹‖Φ‖², i.e. ℓ·ū₀(0).
pub fn first_term(phi: &QuadDiff, cfg: &RadialConfig) -> Result<f64> {
    if phi.is_zero() {
        cylinder_of(phi)?;
        return Ok(0.0);
    }
    let p = first_term_profile(phi, cfg)?;
    Ok(p.ell * p.center())
}

/// Polarized first term with right-hand side −2 Re(φψ̄)/g, y-averaged.
pub fn first_term_polarized(phi: &QuadDiff, psi: &QuadDiff, cfg: &RadialConfig) -> Result<f64> {
    let chart = cylinder_of(phi)?;
    if phi.surface() != psi.surface() {
        return Err(WphError::Input("polarized first term needs both differentials on one chart".into()));
    }
    let _ = mean_rhs(phi)?;
    let _ = mean_rhs(psi)?;
    let rhs = |x: f64| -2.0 * phi.line_cross(psi, x).expect("cylinder repr").re / chart.density(x);
    let p = solve_rotational(&chart, &rhs, RadialBc::Bounded, cfg)?;
    Ok(p.ell * p.center())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsolutionGap {
    pub min_gap: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

/// min over samples of Δ_g v + 4v with v = ‖Φ‖² = |φ|²/g², by a fourth-order
/// difference Laplacian with step 1e−3. Points where v < margin·max v are skipped.
pub fn subsolution_gap(phi: &QuadDiff, points: &[Complex64], margin: f64) -> SubsolutionGap {
    let h = 1e-3;
    let v = |z: Complex64| phi.norm_sq(z);
    let vmax = points.iter().map(|z| v(*z)).fold(0.0, f64::max);
    let mut min_gap = f64::INFINITY;
    let (mut evaluated, mut skipped) = (0, 0);
    for &z in points {
        let v0 = v(z);
        if v0 < margin * vmax || vmax == 0.0 {
            skipped += 1;
            continue;
        }
        let second = |d: Complex64| {
            (-v(z + 2.0 * d) + 16.0 * v(z + d) - 30.0 * v0 + 16.0 * v(z - d) - v(z - 2.0 * d)) / (12.0 * h * h)
        };
        let lap = second(Complex64::new(h, 0.0)) + second(Complex64::new(0.0, h));
        let gap = lap / phi.density(z) + 4.0 * v0;
        min_gap = min_gap.min(gap);
        evaluated += 1;
    }
    SubsolutionGap { min_gap, evaluated, skipped }
}

/// C₀ cosh(√8πx)/cosh(√8πX) on the collar |x| ≤ X.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayBound {
    pub c0: f64,
    pub rate: f64,
    pub half_width: f64,
}

impl DecayBound {
    pub fn bound(&self, x0: f64) -> f64 {
        self.c0 * cosh_ratio(self.rate, x0, self.half_width)
    }
}

/// cosh(a x)/cosh(a X) without overflow.
fn cosh_ratio(a: f64, x: f64, big_x: f64) -> f64 {
    let x = x.abs();
    (a * (x - big_x)).exp() * (1.0 + (-2.0 * a * x).exp()) / (1.0 + (-2.0 * a * big_x).exp())
}

pub fn collar_decay_bound(c0: f64, chart: &CylinderChart) -> Result<DecayBound> {
    let half_width = chart
        .collar_half_width()
        .ok_or_else(|| WphError::Input(format!("no embedded collar for ℓ = {} ≥ 1", chart.ell())))?;
    Ok(DecayBound { c0, rate: COLLAR_RATE, half_width })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollarCheck {
    pub holds: bool,
    pub c0: f64,
    /// max over the grid of ∫|Φ|²dy / bound.
    pub worst_ratio: f64,
}

/// Check ∫_{x=x₀}|φ|² dy ≤ bound(x₀)(1 + 1e−9) on a grid of the collar, with
/// C₀ the larger of the two boundary line integrals.
pub fn verify_collar_decay(phi: &QuadDiff, chart: &CylinderChart, grid_points: usize) -> Result<CollarCheck> {
    let a0 = phi.zero_mode()?;
    let scale = phi.line_mean_sq(0.0)?.sqrt().max(f64::MIN_POSITIVE);
    if a0.norm() > 1e-12 * scale {
        return Err(WphError::Precondition(format!(
            "zero mode a₀ = {a0} is not zero; the bound fails for constant modes"
        )));
    }
    let x_max = chart
        .collar_half_width()
        .ok_or_else(|| WphError::Input(format!("no embedded collar for ℓ = {} ≥ 1", chart.ell())))?;
    let c0 = phi.line_mean_sq(-x_max)?.max(phi.line_mean_sq(x_max)?);
    let bound = DecayBound { c0, rate: COLLAR_RATE, half_width: x_max };
    let n = grid_points.max(3);
    let mut holds = true;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let x = -x_max + 2.0 * x_max * i as f64 / (n - 1) as f64;
        let m = phi.line_mean_sq(x)?;
        let b = bound.bound(x);
        if m > b * (1.0 + 1e-9) {
            holds = false;
        }
        if b > 0.0 {
            worst = worst.max(m / b);
        }
    }
    Ok(CollarCheck { holds, c0, worst_ratio: worst })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingRow {
    pub ell: f64,
    pub half_width: f64,
    pub u0: f64,
    /// ∫ over the core of u, = ℓ·u(0).
    pub core_integral: f64,
    /// (u₁v₁)(X) / (u₁v₁ + u₂v₂)(X) for the particular solution.
    pub particular_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub c0: f64,
    pub rows: Vec<ScalingRow>,
    pub slope_u0: LineFit,
    pub slope_core_integral: LineFit,
    pub slope_particular_ratio: LineFit,
}

/// Right-hand side of the collar problem: −2 D cosh(√8πx) cos²(ℓx)/ℓ² with
/// D = C₀/cosh(√8πX), so that rhs(±X) = −2C₀.
pub fn collar_rhs(ell: f64, c0: f64) -> impl Fn(f64) -> f64 {
    let x_max = ell.acos() / ell;
    move |x: f64| {
        let c = (ell * x).cos();
        -2.0 * c0 * cosh_ratio(COLLAR_RATE, x, x_max) * c * c / (ell * ell)
    }
}

/// Solve the collar problem with u(±X) = C₀ for each ℓ and fit log-log slopes.
pub fn flatparallel_scaling(ells: &[f64], c0: f64, cfg: &RadialConfig) -> Result<ScalingReport> {
    if ells.len() < 3 {
        return Err(WphError::Fit(format!("scaling fit needs at least 3 values of ℓ, got {}", ells.len())));
    }
    if ells.iter().any(|l| !(*l > 0.0 && *l < 1.0)) {
        return Err(WphError::Input("collar lengths must lie in (0, 1)".into()));
    }
    let rows: Vec<Result<ScalingRow>> = ells
        .par_iter()
        .map(|&ell| {
            let chart = CylinderChart::new(ell)?;
            let x_max = chart.collar_half_width().expect("ℓ < 1");
            let rhs = collar_rhs(ell, c0);
            let local = RadialConfig { half_width: Some(x_max), ..cfg.clone() };
            let prof = solve_rotational(&chart, &rhs, RadialBc::Dirichlet(c0, c0), &local)?;
            let u0 = prof.center();
            let q = Quadrature::new(20, 64.0, 64);
            let v1 = q.integrate(0.0, x_max, |t| homogeneous_solutions(ell, t).1 * rhs(t));
            let v2 = -q.integrate(0.0, x_max, |t| homogeneous_solutions(ell, t).0 * rhs(t));
            let (u1, u2) = homogeneous_solutions(ell, x_max);
            let particular_ratio = (u1 * v1) / (u1 * v1 + u2 * v2);
            Ok(ScalingRow { ell, half_width: x_max, u0, core_integral: ell * u0, particular_ratio })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ls: Vec<f64> = rows.iter().map(|r| r.ell).collect();
    let fit = |v: Vec<f64>| loglog_fit(&ls, &v);
    Ok(ScalingReport {
        c0,
        slope_u0: fit(rows.iter().map(|r| r.u0).collect())?,
        slope_core_integral: fit(rows.iter().map(|r| r.core_integral).collect())?,
        slope_particular_ratio: fit(rows.iter().map(|r| r.particular_ratio.abs()).collect())?,
        rows,
    })
}

/// sup over the sampled radii (and 64 angles each) of ‖μ‖ / (r (log 1/r)²).
pub fn cusp_mu_decay(phi: &QuadDiff, radii: &[f64]) -> Result<f64> {
    if !matches!(phi.surface(), ModelSurface::Cusp(_)) {
        return Err(WphError::Input("cusp decay needs a cusp differential".into()));
    }
    let mut sup: f64 = 0.0;
    for &r in radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(WphError::Input(format!("radius {r} outside (0, 1)")));
        }
        let tau = -r.ln();
        for j in 0..64 {
            let z = Complex64::from_polar(r, TWO_PI * j as f64 / 64.0);
            sup = sup.max(phi.beltrami(z).norm() / (r * tau * tau));
        }
    }
    Ok(sup)
}

/// Width in y past y₀ beyond which cusp sources are treated as zero. Sources
/// built from cusp differentials decay like e^{−4πy}, so e^{−4π·12} is far
/// below rounding.
pub const CUSP_SOURCE_WIDTH: f64 = 12.0;

/// Bounded solution of u'' − 2u/y² = −2m(y)/y² on [y₀, ∞) with u(y₀) = `cap`,
/// the rotationally averaged equation in the cusp coordinate y = log(1/r)/(2π).
/// Homogeneous solutions y² and 1/y. `m` is taken to vanish beyond
/// y₀ + [`CUSP_SOURCE_WIDTH`], so past that point u is exactly K/y.
pub fn cusp_radial_solve(m: &dyn Fn(f64) -> f64, y0: f64, cap: f64, at: &[f64]) -> Vec<f64> {
    let gl = GaussLegendre::new(16);
    let f = |t: f64| -2.0 * m(t) / (t * t);
    let y1 = |t: f64| t * t - y0 * y0 * y0 / t;
    let y2 = |t: f64| 1.0 / t;
    let panels = (CUSP_SOURCE_WIDTH * 32.0) as usize;
    let width = CUSP_SOURCE_WIDTH / panels as f64;
    let y_cut = y0 + CUSP_SOURCE_WIDTH;
    // per-panel integrals of y₁f and y₂f, then prefix sums
    let cells: Vec<(f64, f64)> = (0..panels)
        .map(|k| {
            let (a, b) = (y0 + width * k as f64, y0 + width * (k + 1) as f64);
            (gl.integrate(a, b, |t| y1(t) * f(t)), gl.integrate(a, b, |t| y2(t) * f(t)))
        })
        .collect();
    let mut below = vec![0.0; panels + 1];
    let mut above = vec![0.0; panels + 1];
    for k in 0..panels {
        below[k + 1] = below[k] + cells[k].0;
    }
    for k in (0..panels).rev() {
        above[k] = above[k + 1] + cells[k].1;
    }
    at.iter()
        .map(|&y| {
            let (inner, outer) = if y >= y_cut {
                (below[panels], 0.0)
            } else {
                let k = (((y - y0) / width).floor().max(0.0) as usize).min(panels - 1);
                let a = y0 + width * k as f64;
                let b = a + width;
                let head = gl.integrate(a, y.max(a), |t| y1(t) * f(t));
                let tail = gl.integrate(y.max(a), b, |t| y2(t) * f(t));
                (below[k] + head, tail + above[k + 1])
            };
            (y2(y) * inner + y1(y) * outer) / -3.0 + cap * y0 / y
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdiff::FourierMode;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn homogeneous_substitution() {
        for &ell in &[0.3, 1.0, 1.7] {
            let chart = CylinderChart::new(ell).unwrap();
            for k in -9i32..=9 {
                let x = 0.1 * k as f64 * chart.half_width();
                let (u1, u2) = homogeneous_solutions(ell, x);
                let (t, s2) = ((ell * x).tan(), 1.0 / (ell * x).cos().powi(2));
                // second derivatives by hand
                let d1 = 2.0 * ell * ell * s2 * t;
                let d2 = 2.0 * ell * s2 + x * d1;
                let g = chart.density(x);
                assert!((d1 - 2.0 * g * u1).abs() < 1e-9 * (1.0 + d1.abs()));
                assert!((d2 - 2.0 * g * u2).abs() < 1e-9 * (1.0 + d2.abs()));
                // and against a difference quotient, away from the edge
                if k.abs() <= 7 {
                    let h = 1e-3 / ell;
                    let u = |t: f64| homogeneous_solutions(ell, t).0;
                    let fd = (-u(x + 2.0 * h) + 16.0 * u(x + h) - 30.0 * u(x) + 16.0 * u(x - h) - u(x - 2.0 * h))
                        / (12.0 * h * h);
                    assert!((fd - d1).abs() < 1e-6 * (1.0 + d1.abs()), "{ell} {x}");
                }
            }
        }
        // Wronskian u₁u₂' − u₁'u₂ = −1
        let (ell, x, h) = (0.8, 0.4, 1e-5);
        let (a, b) = homogeneous_solutions(ell, x);
        let (ap, bp) = homogeneous_solutions(ell, x + h);
        let (am, bm) = homogeneous_solutions(ell, x - h);
        let w = a * (bp - bm) / (2.0 * h) - (ap - am) / (2.0 * h) * b;
        assert!((w + 1.0).abs() < 1e-8);
    }

    #[test]
    fn dirichlet_homogeneous_case() {
        let chart = CylinderChart::new(0.5).unwrap();
        let cfg = RadialConfig::default();
        let zero = |_: f64| 0.0;
        let p = solve_rotational(&chart, &zero, RadialBc::Dirichlet(0.3, -1.2), &cfg).unwrap();
        let x = p.half_width;
        let (u1, u2) = homogeneous_solutions(0.5, x);
        let c1 = (-1.2 - 0.3) / (2.0 * u1);
        let c2 = (-1.2 + 0.3) / (2.0 * u2);
        for (i, &xi) in p.x.iter().enumerate().step_by(97) {
            let (a, b) = homogeneous_solutions(0.5, xi);
            assert!((p.u[i] - (c1 * a + c2 * b)).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_rhs_bounded_matches_vop() {
        let chart = CylinderChart::new(1.0).unwrap();
        let cfg = RadialConfig::default();
        let rhs = |_: f64| -2.0;
        let p = solve_rotational(&chart, &rhs, RadialBc::Bounded, &cfg).unwrap();
        let v = variation_of_parameters(&chart, &rhs, RadialBc::Bounded, &cfg, &[0.0, 0.5, 1.2]).unwrap();
        assert!((p.center() - v[0]).abs() < 1e-6 * v[0].abs());
        assert!((p.value_at(0.5) - v[1]).abs() < 1e-6 * v[1].abs());
        assert!((p.value_at(1.2) - v[2]).abs() < 1e-6 * v[2].abs());
        // u ≡ 1 does not solve this one since 2g ≠ 2 away from the core
        assert!((v[0] - 1.0).abs() > 0.1);
        assert!(p.residual(&rhs, 0.05) < 1e-6);
    }

    #[test]
    fn identity_solution_is_one() {
        let chart = CylinderChart::new(0.7).unwrap();
        let rhs = |x: f64| -2.0 * chart.density(x);
        let p = solve_rotational(&chart, &rhs, RadialBc::Bounded, &RadialConfig::default()).unwrap();
        assert!(p.u.iter().all(|u| (u - 1.0).abs() < 1e-8));
    }

    #[test]
    fn constant_differential_first_term() {
        for &ell in &[0.5, 1.0, 2.0] {
            let phi = QuadDiff::constant(ModelSurface::cylinder(ell).unwrap(), c(0.6, -0.8));
            let ft = first_term(&phi, &RadialConfig::default()).unwrap();
            let exact = 1.0 / (2.0 * ell.powi(3));
            assert!((ft - exact).abs() < 1e-8 * exact, "{ell}: {ft} vs {exact}");
            let doubled = first_term(&phi.scaled(c(2.0, 0.0)), &RadialConfig::default()).unwrap();
            assert!((doubled - 4.0 * ft).abs() < 1e-9 * ft);
        }
        let zero = QuadDiff::zero(ModelSurface::cylinder(1.0).unwrap());
        assert_eq!(first_term(&zero, &RadialConfig::default()).unwrap(), 0.0);
    }

    #[test]
    fn first_term_refinement_oracle() {
        let phi = QuadDiff::constant(ModelSurface::cylinder(1.0).unwrap(), c(1.0, 0.0));
        let a = first_term(&phi, &RadialConfig::default()).unwrap();
        let b = first_term(&phi, &RadialConfig { intervals: 16384, ..RadialConfig::default() }).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-6 * a);
    }

    #[test]
    fn fourier_first_term_matches_vop() {
        let surf = ModelSurface::cylinder(0.8).unwrap();
        let phi = QuadDiff::new(
            surf,
            QdRepr::CylinderFourier(vec![
                FourierMode::new(0, c(0.4, 0.1), c(0.0, 0.0)),
                FourierMode::new(1, c(0.02, -0.01), c(0.03, 0.0)),
            ]),
        )
        .unwrap();
        let chart = CylinderChart::new(0.8).unwrap();
        let rhs = mean_rhs(&phi).unwrap();
        let cfg = RadialConfig::default();
        let p = solve_rotational(&chart, &rhs, RadialBc::Bounded, &cfg).unwrap();
        let v = variation_of_parameters(&chart, &rhs, RadialBc::Bounded, &cfg, &[0.0, 1.0]).unwrap();
        assert!((p.center() - v[0]).abs() < 1e-6 * v[0]);
        assert!((p.value_at(1.0) - v[1]).abs() < 1e-6 * v[1]);
        assert!(p.sensitivity < 1e-6 * v[0]);
    }

    #[test]
    fn conditioning_error() {
        let chart = CylinderChart::new(0.5).unwrap();
        let cfg = RadialConfig { half_width: Some(chart.half_width() * (1.0 - 1e-8)), ..RadialConfig::default() };
        let r = solve_rotational(&chart, &|_| 1.0, RadialBc::Dirichlet(0.0, 0.0), &cfg);
        assert!(matches!(r, Err(WphError::Conditioning(_))));
    }

    #[test]
    fn maximum_principle_on_output() {
        let chart = CylinderChart::new(0.9).unwrap();
        let phi = QuadDiff::new(
            ModelSurface::Cylinder(chart),
            QdRepr::CylinderFourier(vec![FourierMode::new(1, c(0.05, 0.0), c(0.0, 0.04))]),
        )
        .unwrap();
        let p = first_term_profile(&phi, &RadialConfig::default()).unwrap();
        // sup over the strip of ‖Φ‖², sampled
        let mut sup: f64 = 0.0;
        for i in 0..4000 {
            let x = -chart.half_width() + chart.half_width() * 2.0 * i as f64 / 3999.0;
            for j in 0..16 {
                sup = sup.max(phi.norm_sq(c(x, j as f64 / 16.0)));
            }
        }
        assert!(p.u.iter().all(|&u| u <= sup + 1e-8));
        assert!(p.u.iter().all(|&u| u >= -1e-12));
    }

    #[test]
    fn subsolution_examples() {
        let phi = QuadDiff::constant(ModelSurface::cylinder(1.0).unwrap(), c(0.7, 0.2));
        let pts: Vec<Complex64> = (0..400).map(|k| c(-1.4 + 2.8 * k as f64 / 399.0, 0.3)).collect();
        let g1 = subsolution_gap(&phi, &pts, 1e-4);
        assert!(g1.min_gap >= -1e-6);
        let g2 = subsolution_gap(&phi.scaled(c(2.0, 0.0)), &pts, 1e-4);
        assert!((g2.min_gap - 4.0 * g1.min_gap).abs() < 1e-6);

        let disk = QuadDiff::new(
            ModelSurface::Disk(crate::geom::DiskChart),
            QdRepr::DiskPolynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]),
        )
        .unwrap();
        let pts: Vec<Complex64> = (0..2000)
            .map(|k| Complex64::from_polar(0.1 + 0.8 * (k % 40) as f64 / 39.0, 0.0628 * (k / 40) as f64))
            .collect();
        let g = subsolution_gap(&disk, &pts, 1e-4);
        assert!(g.min_gap >= -1e-6, "{g:?}");
    }

    #[test]
    fn decay_bound_shape() {
        let chart = CylinderChart::new(0.3).unwrap();
        let b = collar_decay_bound(2.0, &chart).unwrap();
        assert!((b.bound(b.half_width) - 2.0).abs() < 1e-12);
        assert!((b.bound(-b.half_width) - 2.0).abs() < 1e-12);
        assert!(b.bound(0.0) < b.bound(0.1));
        assert!((b.bound(0.7) - b.bound(-0.7)).abs() < 1e-15);
    }

    #[test]
    fn collar_verification() {
        let chart = CylinderChart::new(0.4).unwrap();
        let surf = ModelSurface::Cylinder(chart);
        let even =
            QuadDiff::new(surf, QdRepr::CylinderFourier(vec![FourierMode::new(1, c(0.3, 0.1), c(0.3, 0.1))])).unwrap();
        assert!(verify_collar_decay(&even, &chart, 401).unwrap().holds);
        let constant = QuadDiff::constant(surf, c(1.0, 0.0));
        assert!(matches!(verify_collar_decay(&constant, &chart, 11), Err(WphError::Precondition(_))));
        let zero = QuadDiff::zero(surf);
        let z = verify_collar_decay(&zero, &chart, 11).unwrap();
        assert!(z.holds && z.c0 == 0.0);
    }

    #[test]
    fn scaling_needs_three_lengths() {
        assert!(matches!(flatparallel_scaling(&[0.1], 1.0, &RadialConfig::default()), Err(WphError::Fit(_))));
    }

    #[test]
    fn cusp_decay_examples() {
        let cusp = crate::qdiff::cusp_surface();
        let one = QuadDiff::new(cusp, QdRepr::CuspPrincipal { c: c(1.0, 0.0), tail: vec![] }).unwrap();
        let r = (-2f64).exp();
        let mu = one.beltrami(c(r, 0.0)).norm();
        assert!((mu - 4.0 * (-2f64).exp()).abs() < 1e-15);
        assert!((cusp_mu_decay(&one, &[r]).unwrap() - 1.0).abs() < 1e-14);
        let two = one.scaled(c(2.0, 0.0));
        assert!((cusp_mu_decay(&two, &[0.01, r, 0.5]).unwrap() - 2.0).abs() < 1e-14);
        let zero = QuadDiff::new(cusp, QdRepr::CuspPrincipal { c: c(0.0, 0.0), tail: vec![] }).unwrap();
        assert_eq!(cusp_mu_decay(&zero, &[0.1, 0.2]).unwrap(), 0.0);
    }

    #[test]
    fn cusp_radial_solver_checks() {
        // m = 0 leaves the decaying homogeneous solution
        let v = cusp_radial_solve(&|_| 0.0, 0.5, 2.0, &[0.5, 1.0, 2.0]);
        assert!((v[0] - 2.0).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15 && (v[2] - 0.5).abs() < 1e-15);
        // residual of u'' − 2u/y² + 2m/y² for a decaying source
        let m = |y: f64| (-4.0 * PI * y).exp() * y.powi(4);
        let h = 1e-3;
        let ys = [1.0 - 2.0 * h, 1.0 - h, 1.0, 1.0 + h, 1.0 + 2.0 * h];
        let u = cusp_radial_solve(&m, 0.4, 0.0, &ys);
        let d2 = (-u[4] + 16.0 * u[3] - 30.0 * u[2] + 16.0 * u[1] - u[0]) / (12.0 * h * h);
        let res = d2 - 2.0 * u[2] + 2.0 * m(1.0);
        assert!(res.abs() < 1e-8 * m(1.0).max(u[2].abs()), "{res}");
        let at_edge = cusp_radial_solve(&m, 0.4, 0.0, &[0.4])[0];
        assert!(at_edge.abs() < 1e-15);
    }
}
