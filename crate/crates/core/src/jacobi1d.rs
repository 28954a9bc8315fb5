//! The operator d²/dy² − 1 along a geodesic: Green's kernels on the circle,
//! segment and line, periodic and segment solvers for U'' − U = −F, the
//! energy ∫ U_y² + U², and the direct double-integral form of the energy.

use crate::error::{Result, WphError};
use crate::geom::circle_distance;
use crate::qdiff::{FieldKind, FieldOnGeodesic};
use crate::quad::{GaussLegendre, Quadrature};
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::PI;

/// Lengths above this overflow the exponentials in the kernels.
const MAX_LENGTH: f64 = 600.0;
/// The separable segment formula multiplies two such exponentials.
const MAX_SEGMENT_LENGTH: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GreenKernel {
    Circle { length: f64 },
    Segment { length: f64 },
    Line,
}

impl GreenKernel {
    /// K(s, t). Circle arguments are reduced mod L; segment arguments live in [−L/2, L/2].
    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match *self {
            Self::Circle { length } => -circle_weight(length, circle_distance(length, s, t)),
            Self::Segment { length } => {
                let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
                let a = 0.5 * length + lo;
                let b = 0.5 * length - hi;
                -0.5 * (lo - hi).exp() * (-(-2.0 * a).exp_m1()) * (-(-2.0 * b).exp_m1()) / (-(-2.0 * length).exp_m1())
            }
            Self::Line => -0.5 * (-(s - t).abs()).exp(),
        }
    }
}

/// cosh(u − L/2) / (2 sinh(L/2)), written to stay finite for large L.
fn circle_weight(l: f64, u: f64) -> f64 {
    ((u - l).exp() + (-u).exp()) / (-2.0 * (-l).exp_m1())
}

/// sinh(u − L/2) / (2 sinh(L/2)).
fn circle_weight_slope(l: f64, u: f64) -> f64 {
    ((u - l).exp() - (-u).exp()) / (-2.0 * (-l).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMethod {
    Spectral,
    Kernel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSolution {
    pub u: FieldOnGeodesic,
    pub du: FieldOnGeodesic,
    pub energy: f64,
    pub method: SolveMethod,
    /// (a, b) of the homogeneous part a cosh y + b sinh y, segment solves only.
    pub homogeneous: Option<(f64, f64)>,
}

impl JacobiSolution {
    fn build(u: FieldOnGeodesic, du: FieldOnGeodesic, method: SolveMethod, homogeneous: Option<(f64, f64)>) -> Self {
        let mut sol = Self { u, du, energy: 0.0, method, homogeneous };
        sol.energy = energy(&sol);
        sol
    }
}

/// ∫ U_y² + U² by the sample-grid rule (trapezoid if periodic, Simpson otherwise).
pub fn energy(sol: &JacobiSolution) -> f64 {
    let dens = FieldOnGeodesic::from_uniform(
        FieldKind::Other,
        sol.u.start(),
        sol.u.spacing(),
        sol.u.values().iter().zip(sol.du.values()).map(|(u, d)| u * u + d * d).collect(),
        sol.u.is_periodic(),
    )
    .expect("solution grid is valid");
    dens.integral()
}

fn check_length(l: f64) -> Result<()> {
    if !(l > 0.0) || l > MAX_LENGTH {
        return Err(WphError::Input(format!("curve length {l} outside (0, {MAX_LENGTH}]")));
    }
    Ok(())
}

fn check_periodic(f: &FieldOnGeodesic) -> Result<()> {
    if !f.is_periodic() {
        return Err(WphError::Input("closed-curve solver needs a periodic field".into()));
    }
    check_length(f.span())
}

/// Periodic solution of U'' − U = −F by division by 1 + (2πk/L)² in Fourier space.
pub fn solve_periodic(f: &FieldOnGeodesic) -> Result<JacobiSolution> {
    check_periodic(f)?;
    let vals = f.unique_values();
    let n = vals.len();
    let l = f.span();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = vals.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    let mut dbuf = buf.clone();
    for k in 0..n {
        let kk = signed_frequency(k, n);
        let w = 2.0 * PI * kk as f64 / l;
        buf[k] /= 1.0 + w * w;
        dbuf[k] = if 2 * k == n { Complex64::new(0.0, 0.0) } else { buf[k] * Complex64::new(0.0, w) };
    }
    let inv = planner.plan_fft_inverse(n);
    inv.process(&mut buf);
    inv.process(&mut dbuf);
    let scale = 1.0 / n as f64;
    let close = |b: &[Complex64]| {
        let mut v: Vec<f64> = b.iter().map(|c| c.re * scale).collect();
        v.push(v[0]);
        v
    };
    let u = FieldOnGeodesic::from_uniform(FieldKind::JacobiU, f.start(), f.spacing(), close(&buf), true)?;
    let du = FieldOnGeodesic::from_uniform(FieldKind::VariationV, f.start(), f.spacing(), close(&dbuf), true)?;
    Ok(JacobiSolution::build(u, du, SolveMethod::Spectral, None))
}

fn signed_frequency(k: usize, n: usize) -> i64 {
    if 2 * k <= n {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Periodic solution U(y) = −∫ K(y,t) F(t) dt by Gauss–Legendre quadrature.
///
/// Sampled input is evaluated between nodes through its trigonometric interpolant.
pub fn solve_periodic_kernel(f: &FieldOnGeodesic, quad: &Quadrature) -> Result<JacobiSolution> {
    check_periodic(f)?;
    let it = f.trig_interpolant()?;
    solve_periodic_kernel_with(|s| it.eval(s), f.start(), f.span(), f.len(), quad)
}

/// Kernel backend for a source given as a function of arclength with period `length`.
///
/// On [y, y+L] the kernel is the smooth cosh(u − L/2) profile, so the
/// integrand has no kink inside the quadrature interval.
pub fn solve_periodic_kernel_with<F: Fn(f64) -> f64 + Sync>(
    f: F,
    s0: f64,
    length: f64,
    n: usize,
    quad: &Quadrature,
) -> Result<JacobiSolution> {
    check_length(length)?;
    if n < 3 {
        return Err(WphError::Input("need at least three samples".into()));
    }
    let ds = length / (n - 1) as f64;
    let pts = quad.points(0.0, length);
    let weights: Vec<(f64, f64, f64)> =
        pts.iter().map(|&(u, w)| (u, w * circle_weight(length, u), w * circle_weight_slope(length, u))).collect();
    let rows: Vec<(f64, f64)> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let y = s0 + ds * i as f64;
            let (mut u, mut du) = (0.0, 0.0);
            for &(t, wk, wd) in &weights {
                let fv = f(y + t);
                u += wk * fv;
                du -= wd * fv;
            }
            (u, du)
        })
        .collect();
    let mut uv: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mut dv: Vec<f64> = rows.iter().map(|r| r.1).collect();
    uv.push(uv[0]);
    dv.push(dv[0]);
    let u = FieldOnGeodesic::from_uniform(FieldKind::JacobiU, s0, ds, uv, true)?;
    let du = FieldOnGeodesic::from_uniform(FieldKind::VariationV, s0, ds, dv, true)?;
    Ok(JacobiSolution::build(u, du, SolveMethod::Kernel, None))
}

/// max |U'' − U + F| with U'' from spectral differentiation of the U samples.
pub fn periodic_residual(u: &FieldOnGeodesic, f: &FieldOnGeodesic) -> Result<f64> {
    check_periodic(u)?;
    if u.len() != f.len() {
        return Err(WphError::Input("U and F on different grids".into()));
    }
    let vals = u.unique_values();
    let n = vals.len();
    let l = u.span();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = vals.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let w = 2.0 * PI * signed_frequency(k, n) as f64 / l;
        *c *= -w * w;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok((0..n).map(|i| (buf[i].re * scale - vals[i] + f.values()[i]).abs()).fold(0.0, f64::max))
}

/// (1/(2 sinh(L/2))) ∬ F(p) cosh(d(p,q) − L/2) F(q) dp dq by direct 2-D quadrature.
pub fn second_term_kernel(f: &FieldOnGeodesic, quad: &Quadrature) -> Result<f64> {
    check_periodic(f)?;
    let it = f.trig_interpolant()?;
    second_term_kernel_with(|s| it.eval(s), f.start(), f.span(), quad)
}

pub fn second_term_kernel_with<F: Fn(f64) -> f64 + Sync>(f: F, s0: f64, length: f64, quad: &Quadrature) -> Result<f64> {
    check_length(length)?;
    let outer = quad.points(s0, s0 + length);
    let inner: Vec<(f64, f64)> =
        quad.points(0.0, length).into_iter().map(|(u, w)| (u, w * circle_weight(length, u))).collect();
    let rows: Vec<f64> = outer
        .par_iter()
        .map(|&(p, wp)| {
            let mut acc = 0.0;
            for &(u, wk) in &inner {
                acc += wk * f(p + u);
            }
            wp * f(p) * acc
        })
        .collect();
    Ok(rows.iter().sum())
}

/// Segment problem U'' − U = −F on [−L/2, L/2] with U(±L/2) given.
///
/// The particular part uses the segment kernel through its separable form,
/// integrated cell by cell with Gauss–Legendre; the homogeneous part is
/// a cosh y + b sinh y. `n` is rounded up to an odd sample count.
pub fn solve_segment_with<F: Fn(f64) -> f64>(
    f: F,
    length: f64,
    n: usize,
    boundary: (f64, f64),
) -> Result<JacobiSolution> {
    if !(length > 0.0) || length > MAX_SEGMENT_LENGTH {
        return Err(WphError::Input(format!("segment length {length} outside (0, {MAX_SEGMENT_LENGTH}]")));
    }
    if !boundary.0.is_finite() || !boundary.1.is_finite() {
        return Err(WphError::Input("boundary values must be finite".into()));
    }
    let n = (n.max(3)) | 1;
    let half = 0.5 * length;
    let h = length / (n - 1) as f64;
    let ys: Vec<f64> = (0..n).map(|i| -half + h * i as f64).collect();
    let gl = GaussLegendre::new(8);
    // left[i] = ∫_{−L/2}^{y_i} sinh(L/2 + s) F(s) ds, right[i] = ∫_{y_i}^{L/2} sinh(L/2 − s) F(s) ds
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    for i in 1..n {
        left[i] = left[i - 1] + gl.integrate(ys[i - 1], ys[i], |s| (half + s).sinh() * f(s));
    }
    for i in (0..n - 1).rev() {
        right[i] = right[i + 1] + gl.integrate(ys[i], ys[i + 1], |s| (half - s).sinh() * f(s));
    }
    let sl = length.sinh();
    let (alpha, beta) = boundary;
    let a = (alpha + beta) / (2.0 * half.cosh());
    let b = (beta - alpha) / (2.0 * half.sinh());
    let mut u = Vec::with_capacity(n);
    let mut du = Vec::with_capacity(n);
    for (i, &y) in ys.iter().enumerate() {
        let up = ((half - y).sinh() * left[i] + (half + y).sinh() * right[i]) / sl;
        let dup = (-(half - y).cosh() * left[i] + (half + y).cosh() * right[i]) / sl;
        u.push(up + a * y.cosh() + b * y.sinh());
        du.push(dup + a * y.sinh() + b * y.cosh());
    }
    let u = FieldOnGeodesic::from_uniform(FieldKind::JacobiU, -half, h, u, false)?;
    let du = FieldOnGeodesic::from_uniform(FieldKind::VariationV, -half, h, du, false)?;
    Ok(JacobiSolution::build(u, du, SolveMethod::Kernel, Some((a, b))))
}

/// Segment solve for sampled F on [−L/2, L/2]; values between samples come
/// from local cubic interpolation.
pub fn solve_segment(f: &FieldOnGeodesic, boundary: (f64, f64)) -> Result<JacobiSolution> {
    if f.is_periodic() {
        return Err(WphError::Input("segment solver needs an open field".into()));
    }
    let l = f.span();
    let half = 0.5 * l;
    if (f.start() + half).abs() > 1e-9 * l.max(1.0) {
        return Err(WphError::Input("segment field must be sampled on [−L/2, L/2]".into()));
    }
    let vals = f.values().to_vec();
    let h = f.spacing();
    let interp = move |s: f64| cubic_at(&vals, -half, h, s);
    solve_segment_with(interp, l, f.len(), boundary)
}

fn cubic_at(vals: &[f64], s0: f64, h: f64, s: f64) -> f64 {
    let n = vals.len();
    if n < 4 {
        let t = ((s - s0) / h).clamp(0.0, (n - 1) as f64);
        let i = (t.floor() as usize).min(n - 2);
        let w = t - i as f64;
        return vals[i] * (1.0 - w) + vals[i + 1] * w;
    }
    let t = (s - s0) / h;
    let i = (t.floor() as isize).clamp(1, n as isize - 3) as usize;
    let x = t - i as f64;
    let (p0, p1, p2, p3) = (vals[i - 1], vals[i], vals[i + 1], vals[i + 2]);
    // Lagrange cubic through i−1..i+2
    let l0 = -x * (x - 1.0) * (x - 2.0) / 6.0;
    let l1 = (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0;
    let l2 = -(x + 1.0) * x * (x - 2.0) / 2.0;
    let l3 = (x + 1.0) * x * (x - 1.0) / 6.0;
    p0 * l0 + p1 * l1 + p2 * l2 + p3 * l3
}

/// max |U'' − U + F| over interior samples of a segment solution, with a
/// fourth-order difference for U''.
pub fn segment_residual(sol: &JacobiSolution, f: impl Fn(f64) -> f64) -> f64 {
    let u = sol.u.values();
    let h = sol.u.spacing();
    let mut worst: f64 = 0.0;
    for i in 2..u.len().saturating_sub(2) {
        let d2 = (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2]) / (12.0 * h * h);
        worst = worst.max((d2 - u[i] + f(sol.u.s(i))).abs());
    }
    worst
}

/// ½ ∬ e^{−|s−y|} F(s) F(y) ds dy over [lo, hi], splitting the inner integral at the kink.
pub fn line_kernel_energy<F: Fn(f64) -> f64 + Sync>(f: F, lo: f64, hi: f64, quad: &Quadrature) -> f64 {
    let outer = quad.points(lo, hi);
    let rows: Vec<f64> = outer
        .par_iter()
        .map(|&(y, wy)| {
            let left = quad.integrate(lo, y, |s| (s - y).exp() * f(s));
            let right = quad.integrate(y, hi, |s| (y - s).exp() * f(s));
            wy * f(y) * (left + right)
        })
        .collect();
    0.5 * rows.iter().sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(l: f64, n: usize, f: impl Fn(f64) -> f64) -> FieldOnGeodesic {
        FieldOnGeodesic::sample(FieldKind::ImPhiOverG, 0.0, l, n, true, f).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let k = GreenKernel::Circle { length: 2.0 };
        assert!((k.eval(0.0, 1.0) + 1.0 / (2.0 * 1f64.sinh())).abs() < 1e-15);
        assert!((k.eval(0.3, 2.3) - k.eval(0.3, 0.3)).abs() < 1e-15);
        let l = 3.0;
        let k = GreenKernel::Circle { length: l };
        assert!((k.eval(0.7, 0.7) + 0.5 / (l / 2.0).tanh()).abs() < 1e-15);
        let k = GreenKernel::Segment { length: l };
        assert!((k.eval(0.0, 0.0) + 0.5 * (l / 2.0).tanh()).abs() < 1e-15);
        assert_eq!(k.eval(-1.5, 0.4), 0.0);
        assert!(k.eval(0.4, 1.5).abs() < 1e-16);
        // closed form sinh(L/2 + s) sinh(L/2 − y)/sinh L for s ≤ y
        let (s, y) = (-0.4, 0.9);
        let direct = -(l / 2.0 + s).sinh() * (l / 2.0 - y).sinh() / l.sinh();
        assert!((k.eval(s, y) - direct).abs() < 1e-15);
        assert!((k.eval(y, s) - direct).abs() < 1e-15);
        assert!((GreenKernel::Line.eval(1.0, -1.0) + 0.5 * (-2f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn constant_and_eigenfunction_solutions() {
        let l = 3.0;
        let f = sample(l, 65, |_| 0.7);
        let sol = solve_periodic(&f).unwrap();
        assert!(sol.u.values().iter().all(|v| (v - 0.7).abs() < 1e-14));
        assert!((sol.energy - 0.49 * l).abs() < 1e-13);
        assert!((second_term_kernel(&f, &Quadrature::default()).unwrap() - 0.49 * l).abs() < 1e-12);

        let k = 2.0 * PI / l;
        let f = sample(l, 65, |s| (k * s).sin());
        let sol = solve_periodic(&f).unwrap();
        for i in 0..sol.u.len() {
            assert!((sol.u.values()[i] - (k * sol.u.s(i)).sin() / (1.0 + k * k)).abs() < 1e-14);
        }
        let exact = l / (2.0 * (1.0 + k * k));
        assert!((sol.energy - exact).abs() < 1e-13);
        let kern = second_term_kernel(&f, &Quadrature::default()).unwrap();
        assert!((kern - exact).abs() < 1e-7 * exact);

        let zero = sample(l, 17, |_| 0.0);
        assert_eq!(solve_periodic(&zero).unwrap().energy, 0.0);
        assert_eq!(second_term_kernel(&zero, &Quadrature::default()).unwrap(), 0.0);
    }

    #[test]
    fn backends_agree_on_five_modes() {
        let l = 3.0;
        let coef = [(1.0, 0.3, -0.5), (2.0, -0.2, 0.1), (3.0, 0.05, 0.4), (4.0, 0.3, 0.0), (5.0, -0.1, 0.2)];
        let f = |s: f64| {
            coef.iter()
                .map(|&(m, a, b)| a * (2.0 * PI * m * s / l).cos() + b * (2.0 * PI * m * s / l).sin())
                .sum::<f64>()
        };
        let field = sample(l, 129, f);
        let fourier = solve_periodic(&field).unwrap();
        let kernel = solve_periodic_kernel(&field, &Quadrature::default()).unwrap();
        let scale = fourier.u.max_abs();
        for i in 0..field.len() {
            assert!((fourier.u.values()[i] - kernel.u.values()[i]).abs() < 1e-8 * scale);
            assert!((fourier.du.values()[i] - kernel.du.values()[i]).abs() < 1e-8 * fourier.du.max_abs());
        }
        assert!(periodic_residual(&kernel.u, &field).unwrap() < 1e-6 * field.max_abs());
    }

    #[test]
    fn segment_examples() {
        let sol = solve_segment_with(|_| 0.0, 4.0, 101, (0.0, 0.0)).unwrap();
        assert_eq!(sol.u.max_abs(), 0.0);
        assert_eq!(sol.homogeneous, Some((0.0, 0.0)));
        let sol = solve_segment_with(|_| 1.0, 4.0, 101, (1.0, 1.0)).unwrap();
        assert!(sol.u.values().iter().all(|v| (v - 1.0).abs() < 1e-13), "{:?}", sol.u.values()[50]);
        assert!(sol.du.max_abs() < 1e-13);
        let (a, b) = sol.homogeneous.unwrap();
        assert!((a - 1.0 / 2f64.cosh()).abs() < 1e-15 && b == 0.0);
    }

    #[test]
    fn segment_bump_matches_line_kernel() {
        let bump = |s: f64| if s.abs() < 1.0 { (1.0 - s * s).powi(4) } else { 0.0 };
        let l = 10.0;
        let sol = solve_segment_with(bump, l, 1281, (0.0, 0.0)).unwrap();
        let q = Quadrature::default();
        let line = q.integrate(-1.0, 1.0, |t| 0.5 * (-t.abs()).exp() * bump(t));
        let norm1 = q.integrate(-1.0, 1.0, bump);
        let mid = sol.u.values()[sol.u.len() / 2];
        assert!((mid - line).abs() < (-l / 2.0).exp() * norm1);
        assert!(segment_residual(&sol, bump) < 1e-6);
    }

    #[test]
    fn segment_energy_by_parts() {
        // ∫ U'² + U² = ∫ U F + [U U'] at the ends
        let f = |s: f64| (0.7 * s).cos() + 0.2 * s;
        let l = 6.0;
        let sol = solve_segment_with(f, l, 769, (0.3, -0.4)).unwrap();
        let uf: Vec<f64> = (0..sol.u.len()).map(|i| sol.u.values()[i] * f(sol.u.s(i))).collect();
        let n = sol.u.len() - 1;
        let boundary = sol.u.values()[n] * sol.du.values()[n] - sol.u.values()[0] * sol.du.values()[0];
        let rhs = crate::quad::simpson(&uf, sol.u.spacing()) + boundary;
        assert!((sol.energy - rhs).abs() < 1e-9 * sol.energy.abs().max(1.0));
        assert!((sol.u.values()[0] - 0.3).abs() < 1e-14 && (sol.u.values()[n] + 0.4).abs() < 1e-14);
        assert!(segment_residual(&sol, f) < 1e-6);
    }

    #[test]
    fn sampled_segment_matches_closure() {
        let f = |s: f64| (-(s * s)).exp();
        let field = FieldOnGeodesic::sample(FieldKind::ImPhiOverG, -4.0, 4.0, 513, false, f).unwrap();
        let a = solve_segment(&field, (0.0, 0.0)).unwrap();
        let b = solve_segment_with(f, 8.0, 513, (0.0, 0.0)).unwrap();
        // cubic interpolation of the samples costs O(h⁴)
        assert!((a.energy - b.energy).abs() < 1e-8 * b.energy, "{} {}", a.energy, b.energy);
    }

    #[test]
    fn line_energy_of_gaussian() {
        // ½∬ e^{−|s−y|} e^{−s²} e^{−y²}: compare with the segment solution energy at large L
        let f = |s: f64| (-(s * s)).exp();
        let q = Quadrature::default();
        let line = line_kernel_energy(f, -8.0, 8.0, &q);
        let sol = solve_segment_with(f, 40.0, 2561, (0.0, 0.0)).unwrap();
        assert!((line - sol.energy).abs() < 1e-10, "{line} {}", sol.energy);
    }

    #[test]
    fn nonperiodic_input_rejected() {
        let f = FieldOnGeodesic::sample(FieldKind::ImPhiOverG, 0.0, 1.0, 9, false, |s| s).unwrap();
        assert!(solve_periodic(&f).is_err());
        assert!(second_term_kernel(&f, &Quadrature::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn kernel_symmetric_negative(l in 0.2f64..20.0, s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let k = GreenKernel::Circle { length: l };
            let (s, t) = (s * l, t * l);
            prop_assert!((k.eval(s, t) - k.eval(t, s)).abs() < 1e-15);
            prop_assert!(k.eval(s, t) < 0.0);
            let seg = GreenKernel::Segment { length: l };
            let (s, t) = (s - l / 2.0, t - l / 2.0);
            prop_assert!((seg.eval(s, t) - seg.eval(t, s)).abs() < 1e-15);
        }

        #[test]
        fn energy_positive_and_three_way(l in 0.5f64..8.0, a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            let f = |s: f64| a + b * (2.0 * PI * s / l).sin() + c * (6.0 * PI * s / l).cos();
            let field = sample(l, 129, f);
            let sol = solve_periodic(&field).unwrap();
            let uf = sol.u.product_integral(&field).unwrap();
            let kern = second_term_kernel(&field, &Quadrature::default()).unwrap();
            prop_assert!(sol.energy >= 0.0);
            let scale = sol.energy.abs().max(1e-300);
            prop_assert!((sol.energy - uf).abs() <= 1e-8 * scale);
            prop_assert!((sol.energy - kern).abs() <= 1e-7 * scale);
        }
    }
}
