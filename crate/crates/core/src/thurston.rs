//! Pointwise flow-correlation integrals on the disk: the fiber average of
//! the first variation, the correlation I₂ along geodesic rays from a base
//! point, the collapse of I₁, and the ratio (I₁ + I₂)/‖Φ‖².

use crate::elliptic::{solve_rotational, RadialBc, RadialConfig};
use crate::error::{Result, WphError};
use crate::geom::{CylinderChart, DiskChart, ModelSurface, TWO_PI};
use crate::qdiff::{QdRepr, QuadDiff};
use crate::quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub const DEFAULT_T_MAX: f64 = 40.0;
const TAIL_TOL: f64 = 1e-10;

fn disk_poly(phi: &QuadDiff) -> Result<&[Complex64]> {
    match phi.repr() {
        QdRepr::DiskPolynomial(p) => Ok(p),
        QdRepr::Constant(_) if matches!(phi.surface(), ModelSurface::Disk(_)) => Ok(&[]),
        _ => Err(WphError::Input("flow integrals need a polynomial differential on the disk".into())),
    }
}

fn check_interior(p: Complex64) -> Result<()> {
    if !(p.norm() < 1.0) {
        return Err(WphError::Domain { chart: "disk", point: format!("{p}") });
    }
    Ok(())
}

/// (1/2π)∫ Re(e^{2iθ}φ(p))/g(p) dθ by the trapezoid rule on `n` angles.
pub fn fiber_average_first_variation(phi: &QuadDiff, p: Complex64, n: usize) -> Result<f64> {
    disk_poly(phi)?;
    check_interior(p)?;
    let a = phi.phi(p) / DiskChart.density(p);
    let n = n.max(4);
    Ok((0..n).map(|j| (Complex64::from_polar(1.0, 2.0 * TWO_PI * j as f64 / n as f64) * a).re).sum::<f64>() / n as f64)
}

/// (1/2π)∫ Im(e^{2iθ}a) Im(e^{2iθ}b) dθ by the trapezoid rule; equals Re(a b̄)/2.
pub fn half_angle_average(a: Complex64, b: Complex64, n: usize) -> f64 {
    let n = n.max(8);
    (0..n)
        .map(|j| {
            let w = Complex64::from_polar(1.0, 2.0 * TWO_PI * j as f64 / n as f64);
            (w * a).im * (w * b).im
        })
        .sum::<f64>()
        / n as f64
}

/// ∫₀¹ 2(1 − r)² dr by Gauss–Legendre.
pub fn radial_constant() -> f64 {
    GaussLegendre::new(8).integrate(0.0, 1.0, |r| 2.0 * (1.0 - r) * (1.0 - r))
}

/// ∫₀^{t_max} e^{−t} sech⁴(t/2) dt, the radial weight of I₂ for constant φ.
pub fn flow_weight(t_max: f64) -> f64 {
    let gl = GaussLegendre::new(16);
    gl.composite(0.0, t_max, (2.0 * t_max).ceil().max(1.0) as usize, |t| (-t).exp() / (0.5 * t).cosh().powi(4))
}

#[derive(Debug, Clone)]
pub struct FlowCorrelation {
    pub phi: QuadDiff,
    pub base: Complex64,
    pub t_max: f64,
    pub n_theta: usize,
    /// Gauss–Legendre panels per unit flow time.
    pub panels_per_unit: f64,
}

impl FlowCorrelation {
    pub fn new(phi: QuadDiff, base: Complex64) -> Self {
        // after recentering at p the angular spectrum decays like |p|^k
        let tail = if base.norm() > 0.0 { (36.0 / -base.norm().ln()).ceil().min(4096.0) as usize } else { 0 };
        let n_theta = 4 * phi.bandwidth() + 32 + tail;
        Self { phi, base, t_max: DEFAULT_T_MAX, n_theta, panels_per_unit: 2.0 }
    }
}

/// φ pulled back by T(w) = (w + p)/(1 + p̄w), which sends 0 to p.
fn recentered(phi: &QuadDiff, p: Complex64) -> impl Fn(Complex64) -> Complex64 + Sync + '_ {
    let k = 1.0 - p.norm_sqr();
    move |w: Complex64| {
        let d = Complex64::new(1.0, 0.0) + p.conj() * w;
        let t = (w + p) / d;
        let dt = k / (d * d);
        phi.phi(t) * dt * dt
    }
}

fn sup_on_circle(f: &dyn Fn(Complex64) -> Complex64) -> f64 {
    (0..256).map(|j| f(Complex64::from_polar(1.0, TWO_PI * j as f64 / 256.0)).norm()).fold(0.0, f64::max)
}

/// I₂ at the base point: (1/2π)∫∫₀^{t_max} e^{−t} [Im(e^{2iθ}φ(0))/g(0)]
/// [Im(e^{2iθ}φ(r e^{iθ}))/g(r)] dt dθ, r = tanh(t/2), after recentering.
pub fn flow_correlation_i2(fc: &FlowCorrelation) -> Result<f64> {
    disk_poly(&fc.phi)?;
    check_interior(fc.base)?;
    if !(fc.t_max > 0.0) {
        return Err(WphError::Input("t_max must be positive".into()));
    }
    let f = recentered(&fc.phi, fc.base);
    let at0 = f(Complex64::new(0.0, 0.0));
    if at0.norm() == 0.0 {
        return Ok(0.0);
    }
    // the dropped tail is at most e^{−t_max}·|φ(0)|·sup|φ|/16 (g ≥ 4)
    let tail = (-fc.t_max).exp() * at0.norm() * sup_on_circle(&f) / 16.0;
    let scale = at0.norm_sqr() / 48.0;
    if tail > TAIL_TOL * scale {
        return Err(WphError::Truncation(format!(
            "flow time {} leaves a tail of {tail:e} against {scale:e}; raise t_max",
            fc.t_max
        )));
    }
    let gl = GaussLegendre::new(16);
    let panels = (fc.panels_per_unit * fc.t_max).ceil().max(1.0) as usize;
    let pts = gl.composite_points(0.0, fc.t_max, panels);
    let n = fc.n_theta.max(8);
    let slices: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let theta = TWO_PI * j as f64 / n as f64;
            let w2 = Complex64::from_polar(1.0, 2.0 * theta);
            let left = (w2 * at0).im / 4.0;
            let mut acc = 0.0;
            for &(t, wt) in &pts {
                let r = (0.5 * t).tanh();
                let inv_g = (1.0 - r * r) * (1.0 - r * r) / 4.0;
                acc += wt * (-t).exp() * (w2 * f(Complex64::from_polar(r, theta))).im * inv_g;
            }
            left * acc
        })
        .collect();
    Ok(slices.iter().sum::<f64>() / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RatioMode {
    Pointwise,
    Annulus,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThurstonRatio {
    pub i1: f64,
    pub i2: f64,
    pub norm_sq: f64,
    pub ratio: f64,
    pub mode: RatioMode,
    /// −2(Δ − 2)⁻¹(1) from the radial solver, which should be 1.
    pub collapse_factor: f64,
}

/// −2(Δ − 2)⁻¹ applied to the constant 1, from the bounded radial solve on the ℓ = 1 cylinder.
pub fn collapse_factor() -> Result<f64> {
    let chart = CylinderChart::new(1.0)?;
    let rhs = |x: f64| -2.0 * chart.density(x);
    Ok(solve_rotational(&chart, &rhs, RadialBc::Bounded, &RadialConfig::default())?.center())
}

/// (I₁ + I₂)/‖Φ‖² at p. When φ(p) = 0 the sums are averaged over the
/// annulus 0.2 ≤ |p| ≤ 0.6 instead; φ ≡ 0 returns ratio 0.
pub fn thurston_ratio(phi: &QuadDiff, p: Complex64) -> Result<ThurstonRatio> {
    thurston_ratio_with(phi, p, DEFAULT_T_MAX)
}

/// `thurston_ratio` with the flow integrals cut at `t_max`.
pub fn thurston_ratio_with(phi: &QuadDiff, p: Complex64, t_max: f64) -> Result<ThurstonRatio> {
    disk_poly(phi)?;
    check_interior(p)?;
    let factor = collapse_factor()?;
    if phi.is_zero() {
        return Ok(ThurstonRatio {
            i1: 0.0,
            i2: 0.0,
            norm_sq: 0.0,
            ratio: 0.0,
            mode: RatioMode::Zero,
            collapse_factor: factor,
        });
    }
    let scale =
        (0..64).map(|j| phi.phi(Complex64::from_polar(0.5, TWO_PI * j as f64 / 64.0)).norm()).fold(0.0, f64::max);
    let one = |q: Complex64| -> Result<(f64, f64, f64)> {
        let n = phi.norm_sq(q);
        Ok((factor * n, flow_correlation_i2(&FlowCorrelation { t_max, ..FlowCorrelation::new(phi.clone(), q) })?, n))
    };
    let (bases, mode) = if phi.phi(p).norm() > 1e-12 * scale {
        (vec![p], RatioMode::Pointwise)
    } else {
        let mut b = Vec::new();
        for k in 0..3 {
            let rad = 0.2 + 0.2 * k as f64;
            for j in 0..8 {
                b.push(Complex64::from_polar(rad, TWO_PI * (j as f64 + 0.5 * k as f64) / 8.0));
            }
        }
        (b, RatioMode::Annulus)
    };
    let (mut i1, mut i2, mut norm_sq) = (0.0, 0.0, 0.0);
    for q in bases {
        let (a, b, c) = one(q)?;
        i1 += a;
        i2 += b;
        norm_sq += c;
    }
    Ok(ThurstonRatio { i1, i2, norm_sq, ratio: (i1 + i2) / norm_sq, mode, collapse_factor: factor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qdiff::QdRepr;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(coefs: Vec<Complex64>) -> QuadDiff {
        QuadDiff::new(ModelSurface::Disk(DiskChart), QdRepr::DiskPolynomial(coefs)).unwrap()
    }

    #[test]
    fn fiber_average_vanishes() {
        assert!(fiber_average_first_variation(&poly(vec![c(1.0, 0.0)]), c(0.0, 0.0), 64).unwrap().abs() < 1e-15);
        let z2 = poly(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(fiber_average_first_variation(&z2, c(0.3, 0.0), 64).unwrap().abs() < 1e-10);
        assert!(matches!(fiber_average_first_variation(&z2, c(1.0, 0.0), 64), Err(WphError::Domain { .. })));
    }

    #[test]
    fn constants() {
        assert!((radial_constant() - 2.0 / 3.0).abs() < 1e-12);
        assert!((flow_weight(40.0) - 2.0 / 3.0).abs() < 1e-12);
        let (a, b) = (c(0.3, -1.2), c(2.0, 0.7));
        assert!((half_angle_average(a, b, 64) - (a * b.conj()).re / 2.0).abs() < 1e-12);
    }

    #[test]
    fn i2_examples() {
        let k = c(0.6, 0.8);
        let v = flow_correlation_i2(&FlowCorrelation::new(poly(vec![k]), c(0.0, 0.0))).unwrap();
        assert!((v - 1.0 / 48.0).abs() < 1e-12);
        let z = flow_correlation_i2(&FlowCorrelation::new(poly(vec![c(0.0, 0.0), c(1.0, 0.0)]), c(0.0, 0.0))).unwrap();
        assert_eq!(z, 0.0);
        let cubic = poly(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let v = flow_correlation_i2(&FlowCorrelation::new(cubic, c(0.0, 0.0))).unwrap();
        assert!((v - 1.0 / 48.0).abs() < 1e-12);
    }

    #[test]
    fn i2_recentered_and_rotated() {
        let phi = poly(vec![c(0.5, 0.1), c(0.2, -0.3), c(0.0, 0.4)]);
        let p = c(0.3, -0.2);
        let v = flow_correlation_i2(&FlowCorrelation::new(phi.clone(), p)).unwrap();
        assert!((v - phi.norm_sq(p) / 3.0).abs() < 1e-10 * phi.norm_sq(p));
        let rot = phi.scaled(Complex64::from_polar(1.0, 1.1));
        let w = flow_correlation_i2(&FlowCorrelation::new(rot, p)).unwrap();
        assert!((v - w).abs() < 1e-12 * v);
    }

    #[test]
    fn truncation_error() {
        let mut fc = FlowCorrelation::new(poly(vec![c(1.0, 0.0)]), c(0.0, 0.0));
        fc.t_max = 5.0;
        assert!(matches!(flow_correlation_i2(&fc), Err(WphError::Truncation(_))));
    }

    #[test]
    fn ratios() {
        let r = thurston_ratio(&poly(vec![c(1.0, 0.0)]), c(0.0, 0.0)).unwrap();
        assert_eq!(r.mode, RatioMode::Pointwise);
        assert!((r.ratio - 4.0 / 3.0).abs() < 1e-5);
        let r = thurston_ratio(&poly(vec![c(0.0, 0.0), c(1.0, 0.0)]), c(0.0, 0.0)).unwrap();
        assert_eq!(r.mode, RatioMode::Annulus);
        assert!((r.ratio - 4.0 / 3.0).abs() < 1e-4);
        let r = thurston_ratio(&poly(vec![]), c(0.0, 0.0)).unwrap();
        assert_eq!((r.mode, r.ratio), (RatioMode::Zero, 0.0));
    }
}
