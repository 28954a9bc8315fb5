//! The family of complete hyperbolic annuli parametrized by core length ℓ.
//!
//! The tangent ∂/∂ℓ is found geometrically: stretching each vertical line of
//! the strip by the Beltrami coefficient t·c cos²(ℓx)/ℓ² changes the modulus
//! π/ℓ, which fixes the coefficient c per unit change of ℓ. Its WP norm then
//! gives arclength s(ℓ) by quadrature, and ℓ(s) is differentiated numerically
//! and compared with the Hessian formula at unit WP speed.

use super::{hessian_closed, HessianConfig};
use crate::error::{Result, WphError};
use crate::fit::quadratic_through_origin;
use crate::geom::ModelSurface;
use crate::qdiff::{wp_pairing, PairingConfig, QuadDiff};
use crate::quad::{GaussLegendre, Quadrature};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyTangent {
    pub ell: f64,
    /// Coefficient c of the differential c dz² representing ∂/∂ℓ.
    pub coefficient: f64,
    /// ‖∂/∂ℓ‖²_WP
    pub norm_sq: f64,
}

fn strip_quadrature(ell: f64) -> Quadrature {
    // the integrands are smooth in ℓx, so nodes scale with ℓ
    Quadrature::new(16, 64.0 * ell, 128)
}

/// Modulus (width over circumference) of the strip after the deformation t·μ, μ = cos²(ℓx)/ℓ².
fn modulus(ell: f64, t: f64, quad: &Quadrature) -> f64 {
    let hw = 0.5 * PI / ell;
    quad.integrate(-hw, hw, |x| {
        let m = t * (ell * x).cos().powi(2) / (ell * ell);
        (1.0 + m) / (1.0 - m)
    })
}

pub fn family_tangent(ell: f64) -> Result<FamilyTangent> {
    let surface = ModelSurface::cylinder(ell)?;
    let quad = strip_quadrature(ell);
    // keep |tμ| small: μ ≤ 1/ℓ²
    let h = 1e-3 * ell * ell;
    let dm = (modulus(ell, -2.0 * h, &quad) - 8.0 * modulus(ell, -h, &quad) + 8.0 * modulus(ell, h, &quad)
        - modulus(ell, 2.0 * h, &quad))
        / (12.0 * h);
    // modulus π/ℓ, so dℓ = −(ℓ²/π) dM
    let dl_dt = -ell * ell / PI * dm;
    let coefficient = 1.0 / dl_dt;
    let phi = QuadDiff::constant(surface, Complex64::new(coefficient, 0.0));
    let cfg = PairingConfig { quad, ..PairingConfig::default() };
    let norm_sq = wp_pairing(&phi, &phi, &cfg)?;
    Ok(FamilyTangent { ell, coefficient, norm_sq })
}

/// WP arclength from the degenerate end ℓ = 0, integrated in w = √ℓ.
pub fn arclength(ell: f64) -> Result<f64> {
    let gl = GaussLegendre::new(24);
    let w1 = ell.sqrt();
    let mut err = None;
    let s = gl.integrate(0.0, w1, |w| match family_tangent(w * w) {
        Ok(t) => 2.0 * w * t.norm_sq.sqrt(),
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(s),
    }
}

fn invert_arclength(s: f64, guess: f64) -> Result<f64> {
    let mut ell = guess;
    for _ in 0..60 {
        let r = arclength(ell)? - s;
        let step = r / family_tangent(ell)?.norm_sq.sqrt();
        ell = (ell - step).max(0.5 * ell);
        if step.abs() < 1e-13 * ell {
            return Ok(ell);
        }
    }
    Err(WphError::Resolution(format!("arclength inversion did not converge at s = {s}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyRow {
    pub s: f64,
    pub ell: f64,
    pub dl_ds: f64,
    pub d2l_ds2: f64,
    pub d2_sqrt_l: f64,
    pub d2_l23: f64,
    /// Hessian formula at unit WP speed.
    pub formula_hess: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyScan {
    pub rows: Vec<FamilyRow>,
    /// ℓ = κ s² fitted over the rows.
    pub kappa: f64,
    pub kappa_r_squared: f64,
    /// Range of ℓ·‖∂/∂ℓ‖² over the rows.
    pub norm_sq_times_ell: (f64, f64),
    /// Range of c/ℓ for the tangent coefficient c.
    pub coefficient_over_ell: (f64, f64),
}

/// Scan ℓ ∈ [ℓ₀, ℓ₁] at `steps` equal arclength steps.
pub fn cylinder_family_scan(l0: f64, l1: f64, steps: usize, cfg: &HessianConfig) -> Result<FamilyScan> {
    if !(l0 > 0.0 && l1 > l0) || !l1.is_finite() {
        return Err(WphError::Input(format!("need 0 < ℓ₀ < ℓ₁, got {l0}, {l1}")));
    }
    if steps < 5 {
        return Err(WphError::Resolution(format!("{steps} steps are too coarse for second differences (need ≥ 5)")));
    }
    let s0 = arclength(l0)?;
    let s1 = arclength(l1)?;
    let h = (s1 - s0) / steps as f64;
    if s0 - h <= 0.0 {
        return Err(WphError::Resolution(format!(
            "step {h} reaches past the degenerate end; use more than {steps} steps"
        )));
    }
    // nodes −1..=steps+1; the outer two only feed the differences
    let nodes: Vec<f64> = (0..steps + 3).map(|k| s0 + h * (k as f64 - 1.0)).collect();
    let ells: Vec<f64> = nodes
        .par_iter()
        .map(|&s| {
            let frac = ((s - s0) / (s1 - s0)).clamp(-0.5, 1.5);
            let guess = (l0.sqrt() + frac * (l1.sqrt() - l0.sqrt())).powi(2).max(0.1 * l0);
            invert_arclength(s, guess)
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<FamilyRow> = (1..steps + 2)
        .into_par_iter()
        .map(|k| {
            let (lm, l, lp) = (ells[k - 1], ells[k], ells[k + 1]);
            let d2 = |p: f64| (lp.powf(p) - 2.0 * l.powf(p) + lm.powf(p)) / (h * h);
            let t = family_tangent(l)?;
            let unit = t.coefficient / t.norm_sq.sqrt();
            let phi = QuadDiff::constant(ModelSurface::cylinder(l)?, Complex64::new(unit, 0.0));
            let report = hessian_closed(&phi, None, cfg)?;
            Ok(FamilyRow {
                s: nodes[k],
                ell: l,
                dl_ds: (lp - lm) / (2.0 * h),
                d2l_ds2: d2(1.0),
                d2_sqrt_l: d2(0.5),
                d2_l23: d2(2.0 / 3.0),
                formula_hess: report.total,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ss: Vec<f64> = rows.iter().map(|r| r.s).collect();
    let ls: Vec<f64> = rows.iter().map(|r| r.ell).collect();
    let (kappa, kappa_r_squared) = quadratic_through_origin(&ss, &ls)?;
    let tangents = rows.iter().map(|r| family_tangent(r.ell)).collect::<Result<Vec<_>>>()?;
    let range = |v: Vec<f64>| v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    Ok(FamilyScan {
        kappa,
        kappa_r_squared,
        norm_sq_times_ell: range(tangents.iter().map(|t| t.norm_sq * t.ell).collect()),
        coefficient_over_ell: range(tangents.iter().map(|t| t.coefficient / t.ell).collect()),
        rows,
    })
}
