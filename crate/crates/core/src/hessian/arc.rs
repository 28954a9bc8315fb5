//! Regularized Hessian of an infinite geodesic arc running between two cusps.
//!
//! The arc is modeled by its arclength line: a unit band |s| ≤ 1/2 joined to
//! two cusp rays that start at r₀ = e⁻¹ (so log(1/r) = e^{|s|−1/2} on the
//! tails). On the band the field is the cubic Hermite interpolant of the two
//! tail ends. Truncating to |s| ≤ L/2, the Jacobi problem is a segment problem
//! whose boundary values come from the variation field vanishing at the ends;
//! as L grows the energies approach the line-kernel value.

use crate::elliptic::{cusp_radial_solve, CUSP_SOURCE_WIDTH};
use crate::error::{Result, WphError};
use crate::fit::{linear_fit, LineFit};
use crate::geom::{ModelSurface, TWO_PI};
use crate::jacobi1d::{line_kernel_energy, solve_segment_with};
use crate::qdiff::QuadDiff;
use crate::quad::{GaussLegendre, Quadrature};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

/// A real field F = Im(ωφ)/g along the arclength line of an arc.
pub trait ArcField: Sync {
    fn value(&self, s: f64) -> f64;

    fn derivative(&self, s: f64) -> f64 {
        let h = 1e-4;
        (self.value(s - 2.0 * h) - 8.0 * self.value(s - h) + 8.0 * self.value(s + h) - self.value(s + 2.0 * h))
            / (12.0 * h)
    }

    /// Surface term ∫ −2(Δ − 2)⁻¹‖Φ‖² ds over |s| ≤ half_length. Fields
    /// without an underlying differential contribute nothing.
    fn first_term(&self, _half_length: f64) -> Result<f64> {
        Ok(0.0)
    }
}

/// One cusp end: a cusp differential and the angle of the ray into the puncture.
#[derive(Debug, Clone)]
pub struct CuspEnd {
    phi: QuadDiff,
    theta: f64,
}

/// log(1/r) at the start of each tail.
const TAU_START: f64 = 1.0;

impl CuspEnd {
    pub fn new(phi: QuadDiff, theta: f64) -> Result<Self> {
        if !matches!(phi.surface(), ModelSurface::Cusp(_)) {
            return Err(WphError::Input("arc ends need cusp differentials".into()));
        }
        Ok(Self { phi, theta })
    }

    pub fn phi(&self) -> &QuadDiff {
        &self.phi
    }

    /// (F, dF/dσ) at distance σ ≥ 0 down the ray.
    pub fn field(&self, sigma: f64) -> (f64, f64) {
        let tau = TAU_START * sigma.exp();
        let r = (-tau).exp();
        if r < 1e-150 {
            // |F| ≤ C rτ² is far below rounding, and 1/z would overflow
            return (0.0, 0.0);
        }
        let z = Complex64::from_polar(r, self.theta);
        let w2 = Complex64::from_polar(1.0, 2.0 * self.theta);
        let w3 = Complex64::from_polar(1.0, 3.0 * self.theta);
        let inv_g = r * r * tau * tau;
        let a = (w2 * self.phi.phi(z)).im;
        let f = a * inv_g;
        // dr/dσ = −rτ, d(r²τ²)/dσ = 2r²τ²(1 − τ)
        let df = -(r * tau) * inv_g * (w3 * self.phi.dphi(z)).im + 2.0 * inv_g * (1.0 - tau) * a;
        (f, df)
    }

    /// Angular mean of ‖Φ‖² at cusp height y = log(1/r)/(2π).
    fn mean_norm_sq(&self, y: f64) -> f64 {
        let tau = TWO_PI * y;
        let r = (-tau).exp();
        let nth = 2 * self.phi.bandwidth() + 8;
        let mut acc = 0.0;
        for j in 0..nth {
            acc += self.phi.norm_sq(Complex64::from_polar(r, TWO_PI * j as f64 / nth as f64));
        }
        let v = acc / nth as f64;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    }

    /// ∫₀^{σ_max} ū ds on the tail, with ū the bounded cusp solution capped
    /// at the edge by the mean of ‖Φ‖² there.
    pub fn tail_first_term(&self, sigma_max: f64) -> f64 {
        if sigma_max <= 0.0 || self.phi.is_zero() {
            return 0.0;
        }
        let y0 = TAU_START / TWO_PI;
        let m = |y: f64| self.mean_norm_sq(y);
        let cap = m(y0);
        let sigma_cut = ((y0 + CUSP_SOURCE_WIDTH) / y0).ln();
        let upper = sigma_max.min(sigma_cut);
        let gl = GaussLegendre::new(16);
        let panels = (upper * 4.0).ceil().max(1.0) as usize;
        let pts = gl.composite_points(0.0, upper, panels);
        let ys: Vec<f64> = pts.iter().map(|p| y0 * p.0.exp()).collect();
        let us = cusp_radial_solve(&m, y0, cap, &ys);
        let mut total: f64 = pts.iter().zip(&us).map(|(p, u)| p.1 * u).sum();
        if sigma_max > sigma_cut {
            // u = K/y beyond the source
            let y_cut = y0 + CUSP_SOURCE_WIDTH;
            let k = cusp_radial_solve(&m, y0, cap, &[y_cut])[0] * y_cut;
            total += k / y0 * ((-sigma_cut).exp() - (-sigma_max).exp());
        }
        total
    }
}

/// The two-cusp arc: `left` governs s < −1/2, `right` governs s > 1/2.
#[derive(Debug, Clone)]
pub struct TwoCuspArc {
    pub left: CuspEnd,
    pub right: CuspEnd,
}

impl TwoCuspArc {
    pub fn new(left: CuspEnd, right: CuspEnd) -> Self {
        Self { left, right }
    }

    fn value_and_slope(&self, s: f64) -> (f64, f64) {
        if s >= 0.5 {
            self.right.field(s - 0.5)
        } else if s <= -0.5 {
            let (f, d) = self.left.field(-s - 0.5);
            (f, -d)
        } else {
            // cubic Hermite on t = s + 1/2 ∈ [0, 1]
            let (f0, d0) = self.left.field(0.0);
            let (f1, d1) = self.right.field(0.0);
            let d0 = -d0;
            let t = s + 0.5;
            let (t2, t3) = (t * t, t * t * t);
            let v = (2.0 * t3 - 3.0 * t2 + 1.0) * f0
                + (t3 - 2.0 * t2 + t) * d0
                + (-2.0 * t3 + 3.0 * t2) * f1
                + (t3 - t2) * d1;
            let dv = (6.0 * t2 - 6.0 * t) * f0
                + (3.0 * t2 - 4.0 * t + 1.0) * d0
                + (-6.0 * t2 + 6.0 * t) * f1
                + (3.0 * t2 - 2.0 * t) * d1;
            (v, dv)
        }
    }
}

impl ArcField for TwoCuspArc {
    fn value(&self, s: f64) -> f64 {
        self.value_and_slope(s).0
    }

    fn derivative(&self, s: f64) -> f64 {
        self.value_and_slope(s).1
    }

    /// Tails from the cusp solves; on the band the density is the mean of the two edge caps.
    fn first_term(&self, half_length: f64) -> Result<f64> {
        let sigma_max = half_length - 0.5;
        let y0 = TAU_START / TWO_PI;
        let band = 0.5 * (self.left.mean_norm_sq(y0) + self.right.mean_norm_sq(y0)) * (2.0 * half_length.min(0.5));
        Ok(band + self.left.tail_first_term(sigma_max) + self.right.tail_first_term(sigma_max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcRung {
    pub length: f64,
    /// U(−L/2) and U(L/2).
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub energy: f64,
    pub first_term: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcReport {
    pub rungs: Vec<ArcRung>,
    /// ½∬ e^{−|s−y|} F(s) F(y) ds dy.
    pub line_energy: f64,
    /// Last rung's first term plus the line energy.
    pub limit_total: f64,
    /// |energy_{n+1} − energy_n|
    pub cauchy: Vec<f64>,
    /// Fitted decay rates of |a_n| and |b_n| per unit L/2, where enough values are nonzero.
    pub rate_a: Option<f64>,
    pub rate_b: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ArcConfig {
    /// Samples per unit length on each segment.
    pub density: f64,
    pub quad: Quadrature,
}

impl Default for ArcConfig {
    fn default() -> Self {
        Self { density: 64.0, quad: Quadrature::new(16, 32.0, 64) }
    }
}

pub const DEFAULT_LADDER: [f64; 7] = [10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0];

/// sinh(x)/sinh(L) for 0 ≤ x ≤ L without overflow.
fn sinh_ratio(x: f64, l: f64) -> f64 {
    (x - l).exp() * (-(-2.0 * x).exp_m1()) / (-(-2.0 * l).exp_m1())
}

fn decay_rate(lengths: &[f64], values: &[f64]) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        lengths.iter().zip(values).filter(|(_, v)| v.abs() > 1e-250).map(|(l, v)| (0.5 * l, v.abs().ln())).unzip();
    linear_fit(&xs, &ys).ok().filter(|_| xs.len() >= 3)
}

/// Truncated Hessians on the windows |s| ≤ L/2 for each L in `ladder`, and the line-kernel limit.
pub fn hessian_arc(field: &dyn ArcField, ladder: &[f64], cfg: &ArcConfig) -> Result<ArcReport> {
    if ladder.is_empty() || ladder.iter().any(|l| !(*l > 1.0)) || ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(WphError::Input("truncation lengths must be increasing and greater than 1".into()));
    }
    let l_max = *ladder.last().expect("nonempty");
    let h_max = 0.5 * l_max;
    // the field must die off toward both ends
    let peak = cfg.quad.points(-h_max, h_max).iter().map(|p| field.value(p.0).abs()).fold(0.0, f64::max);
    let ends = field.value(-h_max).abs().max(field.value(h_max).abs());
    if !ends.is_finite() || !peak.is_finite() || ends > 1e-8 * peak.max(f64::MIN_POSITIVE) && ends > 0.0 {
        return Err(WphError::Divergence(format!(
            "field is {ends:e} at |s| = {h_max} against a peak of {peak:e}; it does not decay along the arc"
        )));
    }
    let rungs = ladder
        .par_iter()
        .map(|&l| {
            let half = 0.5 * l;
            let vp = cfg.quad.integrate(-half, half, |s| sinh_ratio(half - s, l) * field.derivative(s));
            let vq = -cfg.quad.integrate(-half, half, |s| sinh_ratio(half + s, l) * field.derivative(s));
            let alpha = vp + field.value(-half);
            let beta = vq + field.value(half);
            let n = (cfg.density * l).ceil() as usize + 1;
            let sol = solve_segment_with(|s| field.value(s), l, n, (alpha, beta))?;
            let (a, b) = sol.homogeneous.expect("segment solve");
            let first_term = field.first_term(half)?;
            Ok(ArcRung { length: l, alpha, beta, a, b, energy: sol.energy, first_term, total: first_term + sol.energy })
        })
        .collect::<Result<Vec<_>>>()?;
    let line_energy = line_kernel_energy(|s| field.value(s), -h_max, h_max, &cfg.quad);
    let lengths: Vec<f64> = rungs.iter().map(|r| r.length).collect();
    let rate = |v: Vec<f64>| decay_rate(&lengths, &v).map(|f| -f.slope);
    Ok(ArcReport {
        limit_total: rungs.last().expect("nonempty").first_term + line_energy,
        cauchy: rungs.windows(2).map(|w| (w[1].energy - w[0].energy).abs()).collect(),
        rate_a: rate(rungs.iter().map(|r| r.a).collect()),
        rate_b: rate(rungs.iter().map(|r| r.b).collect()),
        line_energy,
        rungs,
    })
}
