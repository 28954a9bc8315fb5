//! Seeded generators for randomized checks.

use crate::error::Result;
use crate::geom::{CylinderChart, ModelSurface, TWO_PI};
use crate::qdiff::{FieldKind, FieldOnGeodesic, FourierMode, QdRepr, QuadDiff};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Trig polynomial of `modes` random harmonics (plus a mean) on a circle of length L, as a closure.
pub fn trig_polynomial<R: Rng>(rng: &mut R, length: f64, modes: usize) -> impl Fn(f64) -> f64 + Sync + Clone {
    let mean: f64 = rng.gen_range(-1.0..1.0);
    let coefs: Vec<(usize, f64, f64)> =
        (0..modes).map(|_| (rng.gen_range(1..=6usize), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    move |s: f64| {
        let w = TWO_PI * s / length;
        mean + coefs.iter().map(|&(k, a, b)| a * (k as f64 * w).cos() + b * (k as f64 * w).sin()).sum::<f64>()
    }
}

/// `trig_polynomial` sampled on n + 1 points of [0, L] (periodic).
pub fn trig_field<R: Rng>(rng: &mut R, length: f64, modes: usize, n: usize) -> Result<FieldOnGeodesic> {
    let f = trig_polynomial(rng, length, modes);
    FieldOnGeodesic::sample(FieldKind::ImPhiOverG, 0.0, length, n + 1, true, f)
}

/// Random Fourier differential on the cylinder of core length ℓ with modes
/// 0..=max_mode. Coefficients of mode n are damped by e^{−πn·X}, X the chart
/// half-width, so no mode dwarfs the others on the strip.
pub fn fourier_differential<R: Rng>(rng: &mut R, ell: f64, max_mode: u32, zero_mean: bool) -> Result<QuadDiff> {
    let chart = CylinderChart::new(ell)?;
    let hw = chart.half_width();
    let mut modes = Vec::new();
    for n in 0..=max_mode {
        if n == 0 && zero_mean {
            continue;
        }
        let damp = (-std::f64::consts::PI * n as f64 * hw).exp();
        let b = if n == 0 { Complex64::new(0.0, 0.0) } else { unit_complex(rng) * damp };
        modes.push(FourierMode::new(n, unit_complex(rng) * damp, b));
    }
    QuadDiff::new(ModelSurface::Cylinder(chart), QdRepr::CylinderFourier(modes))
}

/// Random polynomial differential on the disk of the given degree.
pub fn disk_polynomial<R: Rng>(rng: &mut R, degree: usize) -> Result<QuadDiff> {
    let coefs = (0..=degree).map(|_| unit_complex(rng)).collect();
    QuadDiff::new(ModelSurface::Disk(crate::geom::DiskChart), QdRepr::DiskPolynomial(coefs))
}
