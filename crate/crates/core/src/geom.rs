//! Model hyperbolic charts (cylinder, disk, cusp), their geodesics and
//! finite-difference curvature.
//!
//! Every chart point is a `Complex64` `z = x + iy`. On the cylinder `y` is
//! periodic with period 1 and the metric is `ℓ² sec²(ℓx) |dz|²`, so the core
//! circle `x = 0` has length exactly `ℓ`.

use crate::error::{Result, WphError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Finite-difference step used by [`curvature_at`].
pub const FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderChart {
    ell: f64,
}

impl CylinderChart {
    pub fn new(ell: f64) -> Result<Self> {
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(WphError::Input(format!("core length must be positive and finite, got {ell}")));
        }
        Ok(Self { ell })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    /// π/(2ℓ): the chart is the strip |x| < half_width.
    pub fn half_width(&self) -> f64 {
        FRAC_PI_2 / self.ell
    }

    /// Half-width arccos(ℓ)/ℓ of the embedded collar; only defined for ℓ < 1.
    pub fn collar_half_width(&self) -> Option<f64> {
        (self.ell < 1.0).then(|| self.ell.acos() / self.ell)
    }

    pub fn density(&self, x: f64) -> f64 {
        let c = (self.ell * x).cos();
        self.ell * self.ell / (c * c)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re.abs() < self.half_width()
    }

    /// Length of the vertical circle {x = x0}, integrated numerically over y.
    pub fn circle_length(&self, x0: f64, samples: usize) -> f64 {
        let n = samples.max(1);
        (0..n).map(|_| self.density(x0).sqrt()).sum::<f64>() / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DiskChart;

impl DiskChart {
    pub fn density(&self, z: Complex64) -> f64 {
        let t = 1.0 - z.norm_sqr();
        4.0 / (t * t)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0
    }

    /// Hyperbolic distance from 0 to a point at Euclidean radius r.
    pub fn distance_from_origin(r: f64) -> f64 {
        ((1.0 + r) / (1.0 - r)).ln()
    }

    /// Euclidean radius at hyperbolic distance s from 0.
    pub fn radius_at(s: f64) -> f64 {
        (0.5 * s).tanh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CuspChart;

impl CuspChart {
    pub fn density(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let l = -r.ln();
        1.0 / (r * r * l * l)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r > 0.0 && r < 1.0
    }

    /// Radius reached after travelling distance s toward the puncture from radius r0.
    pub fn ray_radius(r0: f64, s: f64) -> f64 {
        let tau0 = -r0.ln();
        (-(tau0 * s.exp())).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "lowercase")]
pub enum ModelSurface {
    Cylinder(CylinderChart),
    Disk(DiskChart),
    Cusp(CuspChart),
}

impl ModelSurface {
    pub fn cylinder(ell: f64) -> Result<Self> {
        CylinderChart::new(ell).map(Self::Cylinder)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Cylinder(_) => "cylinder",
            Self::Disk(_) => "disk",
            Self::Cusp(_) => "cusp",
        }
    }

    pub fn density(&self, z: Complex64) -> f64 {
        match self {
            Self::Cylinder(c) => c.density(z.re),
            Self::Disk(d) => d.density(z),
            Self::Cusp(c) => c.density(z),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Self::Cylinder(c) => c.contains(z),
            Self::Disk(d) => d.contains(z),
            Self::Cusp(c) => c.contains(z),
        }
    }

    /// True when z is at least `margin` (Euclidean) away from every boundary
    /// component of the chart.
    pub fn is_interior(&self, z: Complex64, margin: f64) -> bool {
        match self {
            Self::Cylinder(c) => z.re.abs() < c.half_width() - margin,
            Self::Disk(_) => z.norm() < 1.0 - margin,
            Self::Cusp(_) => {
                let r = z.norm();
                r > margin && r < 1.0 - margin
            }
        }
    }
}

/// Gaussian curvature K = −(1/(2g)) Δ₀ log g by centred differences with step [`FD_STEP`].
pub fn curvature_at(surface: &ModelSurface, z: Complex64) -> Result<f64> {
    let h = FD_STEP;
    if !z.re.is_finite() || !z.im.is_finite() || !surface.is_interior(z, 2.0 * h) {
        return Err(WphError::Domain { chart: surface.name(), point: format!("{z}") });
    }
    let lg = |w: Complex64| surface.density(w).ln();
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let c = lg(z);
    let lap = (lg(z + dx) + lg(z - dx) + lg(z + dy) + lg(z - dy) - 4.0 * c) / (h * h);
    Ok(-lap / (2.0 * surface.density(z)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    ClosedCircle,
    Segment,
    InfiniteArc,
}

/// The explicit geodesics (and one non-geodesic circle family) of the model charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvePath {
    /// The vertical circle {x = x0}; a geodesic only for x0 = 0.
    CylinderCircle { chart: CylinderChart, x0: f64 },
    /// Arclength window [s_min, s_max] of the core circle.
    CylinderCoreArc { chart: CylinderChart, s_min: f64, s_max: f64 },
    /// Diameter through 0 in direction θ; s is signed distance from 0.
    DiskRay { theta: f64, s_min: f64, s_max: f64 },
    /// Ray of angle θ from radius r_start into the puncture. `s_max` only
    /// bounds the sampling window; the curve itself is infinite.
    CuspRay { theta: f64, r_start: f64, s_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicCurve {
    path: CurvePath,
}

impl GeodesicCurve {
    pub fn core(chart: CylinderChart) -> Self {
        Self { path: CurvePath::CylinderCircle { chart, x0: 0.0 } }
    }

    pub fn vertical_circle(chart: CylinderChart, x0: f64) -> Self {
        Self { path: CurvePath::CylinderCircle { chart, x0 } }
    }

    pub fn core_arc(chart: CylinderChart, s_min: f64, s_max: f64) -> Result<Self> {
        if !(s_max > s_min) {
            return Err(WphError::Input("empty arclength window".into()));
        }
        Ok(Self { path: CurvePath::CylinderCoreArc { chart, s_min, s_max } })
    }

    pub fn disk_ray(theta: f64, s_min: f64, s_max: f64) -> Result<Self> {
        if !(s_max > s_min) || !s_min.is_finite() || !s_max.is_finite() {
            return Err(WphError::Input("disk ray needs a finite, nonempty window".into()));
        }
        Ok(Self { path: CurvePath::DiskRay { theta, s_min, s_max } })
    }

    pub fn cusp_ray(theta: f64, r_start: f64, s_max: f64) -> Result<Self> {
        if !(r_start > 0.0 && r_start < 1.0) || !(s_max > 0.0) {
            return Err(WphError::Input("cusp ray needs 0 < r_start < 1 and a positive window".into()));
        }
        Ok(Self { path: CurvePath::CuspRay { theta, r_start, s_max } })
    }

    pub fn path(&self) -> &CurvePath {
        &self.path
    }

    pub fn surface(&self) -> ModelSurface {
        match self.path {
            CurvePath::CylinderCircle { chart, .. } | CurvePath::CylinderCoreArc { chart, .. } => {
                ModelSurface::Cylinder(chart)
            }
            CurvePath::DiskRay { .. } => ModelSurface::Disk(DiskChart),
            CurvePath::CuspRay { .. } => ModelSurface::Cusp(CuspChart),
        }
    }

    pub fn kind(&self) -> CurveKind {
        match self.path {
            CurvePath::CylinderCircle { .. } => CurveKind::ClosedCircle,
            CurvePath::CylinderCoreArc { .. } | CurvePath::DiskRay { .. } => CurveKind::Segment,
            CurvePath::CuspRay { .. } => CurveKind::InfiniteArc,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.kind() == CurveKind::ClosedCircle
    }

    pub fn is_geodesic(&self) -> bool {
        match self.path {
            CurvePath::CylinderCircle { x0, .. } => x0 == 0.0,
            _ => true,
        }
    }

    pub fn length(&self) -> f64 {
        match self.path {
            CurvePath::CylinderCircle { chart, x0 } => chart.density(x0).sqrt(),
            CurvePath::CylinderCoreArc { s_min, s_max, .. } | CurvePath::DiskRay { s_min, s_max, .. } => s_max - s_min,
            CurvePath::CuspRay { .. } => f64::INFINITY,
        }
    }

    /// Arclength window used for sampling.
    pub fn sample_range(&self) -> (f64, f64) {
        match self.path {
            CurvePath::CylinderCircle { .. } => (0.0, self.length()),
            CurvePath::CylinderCoreArc { s_min, s_max, .. } | CurvePath::DiskRay { s_min, s_max, .. } => (s_min, s_max),
            CurvePath::CuspRay { s_max, .. } => (0.0, s_max),
        }
    }

    pub fn point_at(&self, s: f64) -> Complex64 {
        match self.path {
            CurvePath::CylinderCircle { chart, x0 } => {
                let y = s / chart.density(x0).sqrt();
                Complex64::new(x0, y.rem_euclid(1.0))
            }
            CurvePath::CylinderCoreArc { chart, .. } => Complex64::new(0.0, (s / chart.ell()).rem_euclid(1.0)),
            CurvePath::DiskRay { theta, .. } => Complex64::from_polar(DiskChart::radius_at(s), theta),
            CurvePath::CuspRay { theta, r_start, .. } => {
                Complex64::from_polar(CuspChart::ray_radius(r_start, s), theta)
            }
        }
    }

    /// Unit factor ω such that ω·φ is the value of φ dz² in the frame whose
    /// first axis is the curve direction. Cylinder circles are vertical in the
    /// chart and use ω = 1; rays of angle θ use e^{2iθ}.
    pub fn frame(&self) -> Complex64 {
        match self.path {
            CurvePath::CylinderCircle { .. } | CurvePath::CylinderCoreArc { .. } => Complex64::new(1.0, 0.0),
            CurvePath::DiskRay { theta, .. } | CurvePath::CuspRay { theta, .. } => {
                Complex64::from_polar(1.0, 2.0 * theta)
            }
        }
    }
}

/// Distance between arclength parameters along the curve.
pub fn geodesic_distance(curve: &GeodesicCurve, s: f64, t: f64) -> f64 {
    let d = (s - t).abs();
    if curve.is_periodic() {
        let l = curve.length();
        let r = d.rem_euclid(l);
        r.min(l - r)
    } else {
        d
    }
}

/// Distance on a circle of length `l`, for callers without a curve object.
pub fn circle_distance(l: f64, s: f64, t: f64) -> f64 {
    let r = (s - t).abs().rem_euclid(l);
    r.min(l - r)
}

/// Area element factor; kept here so quadrature code never hard-codes π.
pub(crate) const TWO_PI: f64 = 2.0 * PI;
