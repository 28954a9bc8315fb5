//! The Hessian of core length on the cylinder, its bounds, the one-parameter
//! cylinder family and the regularized Hessian of an arc between two cusps.

pub mod arc;
pub mod family;

use crate::elliptic::{first_term, first_term_polarized, RadialConfig};
use crate::error::{Result, WphError};
use crate::geom::{CylinderChart, GeodesicCurve, ModelSurface};
use crate::jacobi1d::{second_term_kernel_with, solve_periodic};
use crate::qdiff::{restrict_im_over_g, restrict_normsq, restrict_re_over_g, FieldKind, FieldOnGeodesic, QuadDiff};
use crate::quad::Quadrature;
use num_complex::Complex64;
use serde::Serialize;

pub use arc::{hessian_arc, ArcField, ArcReport, ArcRung, CuspEnd, TwoCuspArc};
pub use family::{cylinder_family_scan, family_tangent, FamilyRow, FamilyScan};

/// Agreement required between the two second-term routes, relative to max(1, total).
pub const SECOND_TERM_TOL: f64 = 1e-7;
/// Slack for the sandwich bounds.
pub const BOUND_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMeta {
    pub n: usize,
    pub tol: f64,
    pub backends: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianReport {
    pub first_term: f64,
    pub second_term_energy: f64,
    pub second_term_kernel: f64,
    pub total: f64,
    pub lower_bound_third: f64,
    pub upper_bound: f64,
    pub first_variation: f64,
    pub grid: GridMeta,
}

impl HessianReport {
    /// Descriptions of every report invariant that fails.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let scale = self.total.abs().max(1.0);
        if (self.total - (self.first_term + self.second_term_energy)).abs() > 1e-12 * scale {
            out.push("total differs from first term + second term".to_string());
        }
        let gap = (self.second_term_energy - self.second_term_kernel).abs();
        if !(gap < SECOND_TERM_TOL * scale) {
            out.push(format!("second-term routes disagree by {gap:e}"));
        }
        if !(self.lower_bound_third <= self.total + BOUND_SLACK) {
            out.push(format!("total {} below the lower bound {}", self.total, self.lower_bound_third));
        }
        if !(self.total <= self.upper_bound + BOUND_SLACK) {
            out.push(format!("total {} above the upper bound {}", self.total, self.upper_bound));
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct HessianConfig {
    /// Minimum number of samples on the core circle.
    pub samples: usize,
    pub radial: RadialConfig,
    pub quad: Quadrature,
}

impl Default for HessianConfig {
    fn default() -> Self {
        Self { samples: 256, radial: RadialConfig::default(), quad: Quadrature::new(16, 64.0, 128) }
    }
}

/// ∫ Re(ωφ)/g ds along the curve.
pub fn first_variation(phi: &QuadDiff, curve: &GeodesicCurve, n: usize) -> Result<f64> {
    if phi.is_zero() {
        return Ok(0.0);
    }
    if !curve.length().is_finite() {
        return Err(WphError::UnsupportedGeodesic("first variation needs a curve of finite length".into()));
    }
    Ok(restrict_re_over_g(phi, curve, n.max(3) | 1)?.integral())
}

fn cylinder_of(phi: &QuadDiff) -> Result<CylinderChart> {
    match phi.surface() {
        ModelSurface::Cylinder(c) => Ok(*c),
        s => Err(WphError::Input(format!("closed Hessian needs a cylinder differential, got {}", s.name()))),
    }
}

fn core_samples(phi: &QuadDiff, cfg: &HessianConfig) -> usize {
    cfg.samples.max(16 * phi.bandwidth() + 32)
}

/// sup over the strip of ‖Φ‖² = |φ|²/g²: grid search followed by local zooms.
pub fn sup_norm_sq(phi: &QuadDiff) -> Result<f64> {
    let chart = cylinder_of(phi)?;
    let hw = chart.half_width();
    let nx = 801;
    let ny = (8 * phi.bandwidth()).max(16);
    let v = |x: f64, y: f64| phi.norm_sq(Complex64::new(x, y));
    let mut best = (0.0, 0.0, v(0.0, 0.0));
    for i in 1..nx - 1 {
        let x = -hw + 2.0 * hw * i as f64 / (nx - 1) as f64;
        for j in 0..ny {
            let y = j as f64 / ny as f64;
            let val = v(x, y);
            if val > best.2 {
                best = (x, y, val);
            }
        }
    }
    let (mut dx, mut dy) = (2.0 * hw / (nx - 1) as f64, 1.0 / ny as f64);
    for _ in 0..40 {
        let (x0, y0, _) = best;
        for a in -2..=2 {
            for b in -2..=2 {
                let x = (x0 + 0.5 * dx * a as f64).clamp(-hw * (1.0 - 1e-12), hw * (1.0 - 1e-12));
                let y = y0 + 0.5 * dy * b as f64;
                let val = v(x, y);
                if val > best.2 {
                    best = (x, y, val);
                }
            }
        }
        dx *= 0.5;
        dy *= 0.5;
    }
    Ok(best.2)
}

/// Energy ∫ U_Φ' U_Ψ' + U_Φ U_Ψ of the periodic solutions for F and G.
fn energy_pairing(f: &FieldOnGeodesic, g: &FieldOnGeodesic) -> Result<f64> {
    let a = solve_periodic(f)?;
    let b = solve_periodic(g)?;
    let dens: Vec<f64> =
        (0..a.u.len()).map(|i| a.u.values()[i] * b.u.values()[i] + a.du.values()[i] * b.du.values()[i]).collect();
    Ok(FieldOnGeodesic::from_uniform(FieldKind::Other, a.u.start(), a.u.spacing(), dens, true)?.integral())
}

fn kernel_pairing(f: &FieldOnGeodesic, g: &FieldOnGeodesic, quad: &Quadrature) -> Result<f64> {
    let (fi, gi) = (f.trig_interpolant()?, g.trig_interpolant()?);
    let plus = second_term_kernel_with(|s| fi.eval(s) + gi.eval(s), f.start(), f.span(), quad)?;
    let minus = second_term_kernel_with(|s| fi.eval(s) - gi.eval(s), f.start(), f.span(), quad)?;
    Ok(0.25 * (plus - minus))
}

/// Hessian of core length in the direction Φ, or the polarized form Hess[Φ, Ψ].
///
/// For the polarized form the bounds are ±√(upper_Φ · upper_Ψ), which holds
/// because the form is positive semidefinite.
pub fn hessian_closed(phi: &QuadDiff, psi: Option<&QuadDiff>, cfg: &HessianConfig) -> Result<HessianReport> {
    let chart = cylinder_of(phi)?;
    let core = GeodesicCurve::core(chart);
    let ell = chart.ell();
    let backends = vec!["spectral".to_string(), "kernel-gl".to_string(), "fd-richardson".to_string()];
    match psi {
        None => {
            let n = core_samples(phi, cfg);
            let f = restrict_im_over_g(phi, &core, n)?;
            let sol = solve_periodic(&f)?;
            let second_term_energy = sol.energy;
            let it = f.trig_interpolant()?;
            let second_term_kernel = second_term_kernel_with(|s| it.eval(s), f.start(), f.span(), &cfg.quad)?;
            let first = first_term(phi, &cfg.radial)?;
            let norm_integral = restrict_normsq(phi, &core, n)?.integral();
            let max_f = f.max_abs();
            let sup = sup_norm_sq(phi)?;
            Ok(HessianReport {
                first_term: first,
                second_term_energy,
                second_term_kernel,
                total: first + second_term_energy,
                lower_bound_third: norm_integral / 3.0,
                upper_bound: ell * (sup + max_f * max_f),
                first_variation: first_variation(phi, &core, n)?,
                grid: GridMeta { n, tol: SECOND_TERM_TOL, backends },
            })
        }
        Some(psi) => {
            if psi.surface() != phi.surface() {
                return Err(WphError::Input("polarized Hessian needs both differentials on one chart".into()));
            }
            let n = core_samples(phi, cfg).max(core_samples(psi, cfg));
            let f = restrict_im_over_g(phi, &core, n)?;
            let g = restrict_im_over_g(psi, &core, n)?;
            let second_term_energy = energy_pairing(&f, &g)?;
            let second_term_kernel = kernel_pairing(&f, &g, &cfg.quad)?;
            let first = first_term_polarized(phi, psi, &cfg.radial)?;
            let up = |q: &QuadDiff, h: &FieldOnGeodesic| -> Result<f64> {
                let m = h.max_abs();
                Ok(ell * (sup_norm_sq(q)? + m * m))
            };
            let bound = (up(phi, &f)? * up(psi, &g)?).sqrt();
            Ok(HessianReport {
                first_term: first,
                second_term_energy,
                second_term_kernel,
                total: first + second_term_energy,
                lower_bound_third: -bound,
                upper_bound: bound,
                first_variation: first_variation(phi, &core, n)?,
                grid: GridMeta { n, tol: SECOND_TERM_TOL, backends },
            })
        }
    }
}

/// ℓ · total ≥ (first variation)²/3, up to 1e−9.
pub fn check_two_thirds_inequality(report: &HessianReport, ell: f64) -> bool {
    ell * report.total >= report.first_variation * report.first_variation / 3.0 - 1e-9
}
