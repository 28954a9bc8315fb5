//! Holomorphic quadratic differentials φ dz² in the model charts, the
//! Beltrami field μ = φ̄/g, restrictions to geodesics and the pairing
//! Re ∬ φ ψ̄ / g dx dy.
//!
//! Cylinder Fourier data is stored mode by mode as
//! `A e^{2πnz} + B e^{−2πnz}` with `n ≥ 0` and `z = x + iy`, so the
//! coefficient of `e^{2πiny}` is `A e^{2πnx}` and that of `e^{−2πiny}` is
//! `B e^{−2πnx}`. Each of these satisfies `a'' = 4π²n² a`.

use crate::error::{Result, WphError};
use crate::geom::{CuspChart, GeodesicCurve, ModelSurface, TWO_PI};
use crate::quad::Quadrature;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub n: u32,
    #[serde(rename = "A")]
    pub a: Complex64,
    #[serde(rename = "B", default)]
    pub b: Complex64,
}

impl FourierMode {
    pub fn new(n: u32, a: Complex64, b: Complex64) -> Self {
        Self { n, a, b }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QdRepr {
    Constant(Complex64),
    CylinderFourier(Vec<FourierMode>),
    DiskPolynomial(Vec<Complex64>),
    /// c/z plus a polynomial tail Σ tail[j] z^j.
    CuspPrincipal {
        c: Complex64,
        tail: Vec<Complex64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadDiff {
    surface: ModelSurface,
    repr: QdRepr,
}

impl QuadDiff {
    pub fn new(surface: ModelSurface, repr: QdRepr) -> Result<Self> {
        let ok = matches!(
            (&surface, &repr),
            (_, QdRepr::Constant(_))
                | (ModelSurface::Cylinder(_), QdRepr::CylinderFourier(_))
                | (ModelSurface::Disk(_), QdRepr::DiskPolynomial(_))
                | (ModelSurface::Cusp(_), QdRepr::CuspPrincipal { .. })
        );
        if !ok {
            return Err(WphError::Input(format!("representation does not live on the {} chart", surface.name())));
        }
        let finite = |c: &Complex64| c.re.is_finite() && c.im.is_finite();
        let all_finite = match &repr {
            QdRepr::Constant(c) => finite(c),
            QdRepr::CylinderFourier(m) => m.iter().all(|m| finite(&m.a) && finite(&m.b)),
            QdRepr::DiskPolynomial(p) => p.iter().all(finite),
            QdRepr::CuspPrincipal { c, tail } => finite(c) && tail.iter().all(finite),
        };
        if !all_finite {
            return Err(WphError::Input("non-finite coefficient".into()));
        }
        let repr = match repr {
            QdRepr::CylinderFourier(modes) => QdRepr::CylinderFourier(merge_modes(modes)),
            other => other,
        };
        Ok(Self { surface, repr })
    }

    pub fn constant(surface: ModelSurface, c: Complex64) -> Self {
        Self { surface, repr: QdRepr::Constant(c) }
    }

    pub fn zero(surface: ModelSurface) -> Self {
        Self::constant(surface, Complex64::new(0.0, 0.0))
    }

    pub fn surface(&self) -> &ModelSurface {
        &self.surface
    }

    pub fn repr(&self) -> &QdRepr {
        &self.repr
    }

    /// φ(z) in chart coordinates.
    pub fn phi(&self, z: Complex64) -> Complex64 {
        match &self.repr {
            QdRepr::Constant(c) => *c,
            QdRepr::CylinderFourier(modes) => modes
                .iter()
                .map(|m| {
                    if m.n == 0 {
                        m.a + m.b
                    } else {
                        let e = (TWO_PI * m.n as f64 * z).exp();
                        m.a * e + m.b / e
                    }
                })
                .sum(),
            QdRepr::DiskPolynomial(p) => horner(p, z),
            QdRepr::CuspPrincipal { c, tail } => c * recip(z) + horner(tail, z),
        }
    }

    /// φ'(z).
    pub fn dphi(&self, z: Complex64) -> Complex64 {
        match &self.repr {
            QdRepr::Constant(_) => Complex64::new(0.0, 0.0),
            QdRepr::CylinderFourier(modes) => modes
                .iter()
                .filter(|m| m.n > 0)
                .map(|m| {
                    let k = TWO_PI * m.n as f64;
                    let e = (k * z).exp();
                    k * (m.a * e - m.b / e)
                })
                .sum(),
            QdRepr::DiskPolynomial(p) => horner_derivative(p, z),
            QdRepr::CuspPrincipal { c, tail } => -c * recip(z) * recip(z) + horner_derivative(tail, z),
        }
    }

    pub fn density(&self, z: Complex64) -> f64 {
        self.surface.density(z)
    }

    /// μ = φ̄/g.
    pub fn beltrami(&self, z: Complex64) -> Complex64 {
        self.phi(z).conj() / self.density(z)
    }

    /// ‖Φ‖² = |φ|²/g².
    pub fn norm_sq(&self, z: Complex64) -> f64 {
        let g = self.density(z);
        self.phi(z).norm_sqr() / (g * g)
    }

    /// Fourier coefficients in y at fixed x as (frequency, coefficient), cylinder only.
    pub fn fourier_coefficients(&self, x: f64) -> Result<Vec<(i64, Complex64)>> {
        match (&self.surface, &self.repr) {
            (ModelSurface::Cylinder(_), QdRepr::Constant(c)) => Ok(vec![(0, *c)]),
            (ModelSurface::Cylinder(_), QdRepr::CylinderFourier(modes)) => {
                let mut out = Vec::with_capacity(2 * modes.len());
                for m in modes {
                    if m.n == 0 {
                        out.push((0, m.a + m.b));
                    } else {
                        let k = TWO_PI * m.n as f64 * x;
                        out.push((m.n as i64, m.a * k.exp()));
                        out.push((-(m.n as i64), m.b * (-k).exp()));
                    }
                }
                Ok(out)
            }
            _ => Err(WphError::Input("Fourier coefficients exist only on the cylinder".into())),
        }
    }

    /// ∫₀¹ |φ(x + iy)|² dy, by Parseval.
    pub fn line_mean_sq(&self, x: f64) -> Result<f64> {
        Ok(self.fourier_coefficients(x)?.iter().map(|(_, c)| c.norm_sqr()).sum())
    }

    /// ∫₀¹ φ ψ̄ dy at fixed x, by Parseval.
    pub fn line_cross(&self, other: &QuadDiff, x: f64) -> Result<Complex64> {
        let a = self.fourier_coefficients(x)?;
        let b = other.fourier_coefficients(x)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, ca) in &a {
            for (j, cb) in &b {
                if k == j {
                    acc += ca * cb.conj();
                }
            }
        }
        Ok(acc)
    }

    /// Mode-0 coefficient a₀ (cylinder only).
    pub fn zero_mode(&self) -> Result<Complex64> {
        Ok(self.fourier_coefficients(0.0)?.iter().filter(|(k, _)| *k == 0).map(|(_, c)| *c).sum())
    }

    /// Largest frequency present (cylinder), polynomial degree (disk/cusp tail).
    pub fn bandwidth(&self) -> usize {
        match &self.repr {
            QdRepr::Constant(_) => 0,
            QdRepr::CylinderFourier(m) => m.iter().map(|m| m.n as usize).max().unwrap_or(0),
            QdRepr::DiskPolynomial(p) => p.len().saturating_sub(1),
            QdRepr::CuspPrincipal { tail, .. } => tail.len() + 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        let z = |c: &Complex64| c.norm_sqr() == 0.0;
        match &self.repr {
            QdRepr::Constant(c) => z(c),
            QdRepr::CylinderFourier(m) => m.iter().all(|m| z(&m.a) && z(&m.b)),
            QdRepr::DiskPolynomial(p) => p.iter().all(z),
            QdRepr::CuspPrincipal { c, tail } => z(c) && tail.iter().all(z),
        }
    }

    /// Multiply by a complex scalar.
    pub fn scaled(&self, s: Complex64) -> Self {
        let repr = match &self.repr {
            QdRepr::Constant(c) => QdRepr::Constant(c * s),
            QdRepr::CylinderFourier(m) => {
                QdRepr::CylinderFourier(m.iter().map(|m| FourierMode::new(m.n, m.a * s, m.b * s)).collect())
            }
            QdRepr::DiskPolynomial(p) => QdRepr::DiskPolynomial(p.iter().map(|c| c * s).collect()),
            QdRepr::CuspPrincipal { c, tail } => {
                QdRepr::CuspPrincipal { c: c * s, tail: tail.iter().map(|t| t * s).collect() }
            }
        };
        Self { surface: self.surface, repr }
    }

    /// Sum of two differentials on the same chart.
    pub fn add(&self, other: &QuadDiff) -> Result<Self> {
        if self.surface != other.surface {
            return Err(WphError::Input("cannot add differentials on different charts".into()));
        }
        let repr = match (&self.repr, &other.repr) {
            (QdRepr::Constant(a), QdRepr::Constant(b)) => QdRepr::Constant(a + b),
            (QdRepr::CuspPrincipal { c: a, tail: ta }, QdRepr::CuspPrincipal { c: b, tail: tb }) => {
                QdRepr::CuspPrincipal { c: a + b, tail: add_poly(ta, tb) }
            }
            (QdRepr::CuspPrincipal { c, tail }, QdRepr::Constant(k))
            | (QdRepr::Constant(k), QdRepr::CuspPrincipal { c, tail }) => {
                QdRepr::CuspPrincipal { c: *c, tail: add_poly(tail, &[*k]) }
            }
            _ => match &self.surface {
                ModelSurface::Cylinder(_) => {
                    let mut modes = self.as_modes();
                    modes.extend(other.as_modes());
                    QdRepr::CylinderFourier(modes)
                }
                ModelSurface::Disk(_) => QdRepr::DiskPolynomial(add_poly(&self.as_poly(), &other.as_poly())),
                ModelSurface::Cusp(_) => unreachable!("cusp sums handled above"),
            },
        };
        Self::new(self.surface, repr)
    }

    fn as_modes(&self) -> Vec<FourierMode> {
        match &self.repr {
            QdRepr::Constant(c) => vec![FourierMode::new(0, *c, Complex64::new(0.0, 0.0))],
            QdRepr::CylinderFourier(m) => m.clone(),
            _ => Vec::new(),
        }
    }

    fn as_poly(&self) -> Vec<Complex64> {
        match &self.repr {
            QdRepr::Constant(c) => vec![*c],
            QdRepr::DiskPolynomial(p) => p.clone(),
            _ => Vec::new(),
        }
    }

    pub fn from_json(text: &str, surface_for: impl FnOnce(ChartTag) -> Result<ModelSurface>) -> Result<Self> {
        let spec: QdSpec =
            serde_json::from_str(text).map_err(|e| WphError::Input(format!("quadratic differential JSON: {e}")))?;
        spec.build(surface_for)
    }
}

fn merge_modes(mut modes: Vec<FourierMode>) -> Vec<FourierMode> {
    modes.sort_by_key(|m| m.n);
    let mut out: Vec<FourierMode> = Vec::with_capacity(modes.len());
    for m in modes {
        match out.last_mut() {
            Some(last) if last.n == m.n => {
                last.a += m.a;
                last.b += m.b;
            }
            _ => out.push(m),
        }
    }
    out
}

fn add_poly(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default()).collect()
}

/// 1/z without squaring |z|, which underflows deep in a cusp.
fn recip(z: Complex64) -> Complex64 {
    let r = z.norm();
    z.conj() / r / r
}

fn horner(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn horner_derivative(p: &[Complex64], z: Complex64) -> Complex64 {
    p.iter().enumerate().skip(1).rev().fold(Complex64::new(0.0, 0.0), |acc, (k, c)| acc * z + c * k as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartTag {
    Cylinder,
    Disk,
    Cusp,
}

/// JSON form consumed by the CLI.
///
/// ```json
/// {"kind":"fourier","coefficients":[{"n":1,"A":[0.5,0],"B":[0,0.25]}]}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartTag>,
    #[serde(flatten)]
    pub body: QdBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum QdBody {
    Constant {
        c: Complex64,
    },
    Fourier {
        coefficients: Vec<FourierMode>,
    },
    Poly {
        #[serde(alias = "coeffs")]
        coefficients: Vec<Complex64>,
    },
    Cusp {
        c: Complex64,
        #[serde(default)]
        coefficients: Vec<Complex64>,
    },
}

impl QdSpec {
    /// Default chart for each kind; `constant` defaults to the cylinder.
    pub fn chart_tag(&self) -> ChartTag {
        self.chart.unwrap_or(match self.body {
            QdBody::Constant { .. } | QdBody::Fourier { .. } => ChartTag::Cylinder,
            QdBody::Poly { .. } => ChartTag::Disk,
            QdBody::Cusp { .. } => ChartTag::Cusp,
        })
    }

    pub fn build(&self, surface_for: impl FnOnce(ChartTag) -> Result<ModelSurface>) -> Result<QuadDiff> {
        let surface = surface_for(self.chart_tag())?;
        let repr = match &self.body {
            QdBody::Constant { c } => QdRepr::Constant(*c),
            QdBody::Fourier { coefficients } => QdRepr::CylinderFourier(coefficients.clone()),
            QdBody::Poly { coefficients } => QdRepr::DiskPolynomial(coefficients.clone()),
            QdBody::Cusp { c, coefficients } => QdRepr::CuspPrincipal { c: *c, tail: coefficients.clone() },
        };
        QuadDiff::new(surface, repr)
    }
}

/// Max over a grid of |∂̄φ| / max|φ|, with ∂̄ = ½(∂x + i∂y) by centred differences.
pub fn holomorphy_residual(phi: &QuadDiff, points: &[Complex64]) -> f64 {
    let h = 1e-5;
    let dx = Complex64::new(h, 0.0);
    let dy = Complex64::new(0.0, h);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &z in points {
        let fx = (phi.phi(z + dx) - phi.phi(z - dx)) / (2.0 * h);
        let fy = (phi.phi(z + dy) - phi.phi(z - dy)) / (2.0 * h);
        worst = worst.max((0.5 * (fx + I * fy)).norm());
        scale = scale.max(phi.phi(z).norm());
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldKind {
    ImPhiOverG,
    RePhiOverG,
    NormPhiSq,
    JacobiU,
    VariationV,
    Other,
}

/// Uniform samples of a real function of arclength.
///
/// For periodic fields the last sample repeats the first and `span()` is the period.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldOnGeodesic {
    pub kind: FieldKind,
    s0: f64,
    ds: f64,
    values: Vec<f64>,
    periodic: bool,
}

impl FieldOnGeodesic {
    pub fn from_uniform(kind: FieldKind, s0: f64, ds: f64, values: Vec<f64>, periodic: bool) -> Result<Self> {
        if values.len() < 2 || !(ds > 0.0) {
            return Err(WphError::Input("field needs two or more samples and positive spacing".into()));
        }
        if periodic {
            let (a, b) = (values[0], values[values.len() - 1]);
            if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                return Err(WphError::Input("periodic field must repeat its first sample at the end".into()));
            }
        }
        Ok(Self { kind, s0, ds, values, periodic })
    }

    /// Build from explicit (s, value) pairs, rejecting non-uniform spacing.
    pub fn from_samples(kind: FieldKind, samples: &[(f64, f64)], periodic: bool) -> Result<Self> {
        if samples.len() < 2 {
            return Err(WphError::Input("field needs two or more samples".into()));
        }
        let ds = samples[1].0 - samples[0].0;
        let span = samples[samples.len() - 1].0 - samples[0].0;
        for w in samples.windows(2) {
            if ((w[1].0 - w[0].0) - ds).abs() > 1e-9 * span.abs().max(1.0) {
                return Err(WphError::Input("samples are not uniformly spaced".into()));
            }
        }
        let values = samples.iter().map(|p| p.1).collect();
        Self::from_uniform(kind, samples[0].0, ds, values, periodic)
    }

    /// Sample `f` at `n` uniform points of [a, b] (both included).
    pub fn sample(kind: FieldKind, a: f64, b: f64, n: usize, periodic: bool, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(WphError::Input("need n ≥ 2 and a nonempty interval".into()));
        }
        let ds = (b - a) / (n - 1) as f64;
        let mut values: Vec<f64> = (0..n).map(|i| f(a + ds * i as f64)).collect();
        if periodic {
            values[n - 1] = values[0];
        }
        Self::from_uniform(kind, a, ds, values, periodic)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.s0
    }

    pub fn spacing(&self) -> f64 {
        self.ds
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn s(&self, i: usize) -> f64 {
        self.s0 + self.ds * i as f64
    }

    pub fn span(&self) -> f64 {
        self.ds * (self.values.len() - 1) as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// One period (periodic) or the whole window (open) of samples, without duplicates.
    pub fn unique_values(&self) -> &[f64] {
        if self.periodic {
            &self.values[..self.values.len() - 1]
        } else {
            &self.values
        }
    }

    /// ∫ f ds: trapezoid for periodic fields, Simpson otherwise.
    pub fn integral(&self) -> f64 {
        if self.periodic {
            crate::quad::trapezoid_periodic(self.unique_values(), self.span())
        } else {
            crate::quad::simpson(&self.values, self.ds)
        }
    }

    pub fn map(&self, kind: FieldKind, f: impl Fn(f64) -> f64) -> Self {
        Self { kind, values: self.values.iter().map(|v| f(*v)).collect(), ..self.clone() }
    }

    /// Pointwise product with a field on the same grid.
    pub fn product_integral(&self, other: &FieldOnGeodesic) -> Result<f64> {
        if self.values.len() != other.values.len() || (self.ds - other.ds).abs() > 1e-15 * self.ds {
            return Err(WphError::Input("fields live on different grids".into()));
        }
        let prod: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { values: prod, ..self.clone() }.integral())
    }

    pub fn trig_interpolant(&self) -> Result<TrigInterpolant> {
        if !self.periodic {
            return Err(WphError::Input("trigonometric interpolation needs a periodic field".into()));
        }
        Ok(TrigInterpolant::new(self.unique_values(), self.s0, self.span()))
    }
}

/// Band-limited interpolant of periodic samples, exact for trigonometric
/// polynomials of degree below half the sample count.
#[derive(Debug, Clone)]
pub struct TrigInterpolant {
    s0: f64,
    period: f64,
    mean: f64,
    /// (k, Re c_k, Im c_k) for 1 ≤ k ≤ n/2, already doubled for real reconstruction.
    terms: Vec<(f64, f64, f64)>,
}

impl TrigInterpolant {
    pub fn new(values: &[f64], s0: f64, period: f64) -> Self {
        let n = values.len();
        let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let inv = 1.0 / n as f64;
        let mean = buf[0].re * inv;
        let mut terms = Vec::with_capacity(n / 2);
        for (k, c) in buf.iter().enumerate().take(n / 2 + 1).skip(1) {
            // the Nyquist coefficient is shared with its alias
            let w = if 2 * k == n { inv } else { 2.0 * inv };
            terms.push((k as f64, c.re * w, c.im * w));
        }
        Self { s0, period, mean, terms }
    }

    pub fn eval(&self, s: f64) -> f64 {
        let theta = TWO_PI * (s - self.s0) / self.period;
        let (sin1, cos1) = theta.sin_cos();
        let mut acc = self.mean;
        let (mut c, mut sn) = (1.0, 0.0);
        for &(_, re, im) in &self.terms {
            let nc = c * cos1 - sn * sin1;
            sn = sn * cos1 + c * sin1;
            c = nc;
            acc += re * c - im * sn;
        }
        acc
    }
}

/// Restriction of the frame-adapted value ω φ / g along a model geodesic.
pub fn restrict(phi: &QuadDiff, curve: &GeodesicCurve, n: usize, kind: FieldKind) -> Result<FieldOnGeodesic> {
    if &curve.surface() != phi.surface() {
        return Err(WphError::UnsupportedGeodesic(format!(
            "curve lives on a different {} chart than the differential",
            curve.surface().name()
        )));
    }
    if !curve.is_geodesic() {
        return Err(WphError::UnsupportedGeodesic("vertical circle off the core".into()));
    }
    let omega = curve.frame();
    let value = |s: f64| {
        let z = curve.point_at(s);
        let a = omega * phi.phi(z) / phi.density(z);
        match kind {
            FieldKind::ImPhiOverG => a.im,
            FieldKind::RePhiOverG => a.re,
            FieldKind::NormPhiSq => a.norm_sqr(),
            _ => f64::NAN,
        }
    };
    if !matches!(kind, FieldKind::ImPhiOverG | FieldKind::RePhiOverG | FieldKind::NormPhiSq) {
        return Err(WphError::Input("restriction produces Im, Re or norm fields only".into()));
    }
    let (a, b) = curve.sample_range();
    FieldOnGeodesic::sample(kind, a, b, n, curve.is_periodic(), value)
}

pub fn restrict_im_over_g(phi: &QuadDiff, curve: &GeodesicCurve, n: usize) -> Result<FieldOnGeodesic> {
    restrict(phi, curve, n, FieldKind::ImPhiOverG)
}

pub fn restrict_re_over_g(phi: &QuadDiff, curve: &GeodesicCurve, n: usize) -> Result<FieldOnGeodesic> {
    restrict(phi, curve, n, FieldKind::RePhiOverG)
}

pub fn restrict_normsq(phi: &QuadDiff, curve: &GeodesicCurve, n: usize) -> Result<FieldOnGeodesic> {
    restrict(phi, curve, n, FieldKind::NormPhiSq)
}

/// Integration domain controls for [`wp_pairing`].
#[derive(Debug, Clone)]
pub struct PairingConfig {
    /// Cylinder: integrate over |x| < half_width; `None` means the whole strip.
    pub cylinder_half_width: Option<f64>,
    /// Disk: truncation radius.
    pub disk_radius: f64,
    /// Cusp: outer radius; the puncture side is integrated to log(1/r) = `cusp_tau_max`.
    pub cusp_radius: f64,
    pub cusp_tau_max: f64,
    pub quad: Quadrature,
}

impl Default for PairingConfig {
    fn default() -> Self {
        Self {
            cylinder_half_width: None,
            disk_radius: 1.0 - 1e-3,
            cusp_radius: 1.0 - 1e-3,
            cusp_tau_max: 60.0,
            quad: Quadrature::default(),
        }
    }
}

/// Re ∬ φ ψ̄ / g dx dy over the (truncated) chart domain.
pub fn wp_pairing(phi: &QuadDiff, psi: &QuadDiff, cfg: &PairingConfig) -> Result<f64> {
    if phi.surface() != psi.surface() {
        return Err(WphError::Input("pairing needs both differentials on the same chart".into()));
    }
    let band = phi.bandwidth().max(psi.bandwidth());
    match phi.surface() {
        ModelSurface::Cylinder(chart) => {
            let x_max = cfg.cylinder_half_width.unwrap_or(chart.half_width()).min(chart.half_width());
            // trapezoid in y with more nodes than the highest frequency is exact
            let ny = 2 * band + 2;
            let v = cfg.quad.integrate(-x_max, x_max, |x| {
                let g = chart.density(x);
                let mut acc = 0.0;
                for j in 0..ny {
                    let z = Complex64::new(x, j as f64 / ny as f64);
                    acc += (phi.phi(z) * psi.phi(z).conj()).re;
                }
                acc / (ny as f64 * g)
            });
            Ok(v)
        }
        ModelSurface::Disk(_) => Ok(disk_pairing(phi, psi, cfg.disk_radius, band, &cfg.quad)),
        ModelSurface::Cusp(_) => {
            let tau0 = -cfg.cusp_radius.ln();
            let nth = 2 * band + 4;
            let radial = |tau: f64| {
                let r = (-tau).exp();
                let mut acc = 0.0;
                for j in 0..nth {
                    let z = Complex64::from_polar(r, TWO_PI * j as f64 / nth as f64);
                    acc += (phi.phi(z) * psi.phi(z).conj()).re;
                }
                // 1/g · r dr = r²τ² · r · r dτ
                acc * TWO_PI / nth as f64 * r.powi(4) * tau * tau
            };
            // the integrand must die off toward the puncture
            let tail = radial(cfg.cusp_tau_max).abs() + radial(cfg.cusp_tau_max - 1.0).abs();
            let scale = radial(tau0.max(1e-3) + 0.5).abs().max(f64::MIN_POSITIVE);
            if !tail.is_finite() || tail > 1e-12 * scale.max(1.0) {
                return Err(WphError::Divergence("pairing integrand does not decay into the cusp".into()));
            }
            Ok(cfg.quad.integrate(tau0, cfg.cusp_tau_max, radial))
        }
    }
}

fn disk_pairing(phi: &QuadDiff, psi: &QuadDiff, rho: f64, band: usize, quad: &Quadrature) -> f64 {
    let nth = 2 * band + 4;
    quad.integrate(0.0, rho, |r| {
        let mut acc = 0.0;
        for j in 0..nth {
            let z = Complex64::from_polar(r, TWO_PI * j as f64 / nth as f64);
            acc += (phi.phi(z) * psi.phi(z).conj()).re;
        }
        let t = 1.0 - r * r;
        acc * TWO_PI / nth as f64 * t * t / 4.0 * r
    })
}

/// Disk pairing with its Richardson estimate of the untruncated value.
///
/// The omitted annulus contributes O((1−ρ)³), so halving 1−ρ shrinks it by 8.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskPairing {
    pub truncated: f64,
    pub extrapolated: f64,
    pub change: f64,
}

pub fn wp_pairing_disk_extrapolated(phi: &QuadDiff, psi: &QuadDiff, cfg: &PairingConfig) -> Result<DiskPairing> {
    if !matches!(phi.surface(), ModelSurface::Disk(_)) || phi.surface() != psi.surface() {
        return Err(WphError::Input("disk extrapolation needs two disk differentials".into()));
    }
    let band = phi.bandwidth().max(psi.bandwidth());
    let rho = cfg.disk_radius;
    let rho2 = 1.0 - 2.0 * (1.0 - rho);
    let p1 = disk_pairing(phi, psi, rho, band, &cfg.quad);
    let p2 = disk_pairing(phi, psi, rho2, band, &cfg.quad);
    let extrapolated = p1 + (p1 - p2) / 7.0;
    Ok(DiskPairing { truncated: p1, extrapolated, change: (extrapolated - p1).abs() })
}

/// Helper used by several modules: the cusp chart surface.
pub fn cusp_surface() -> ModelSurface {
    ModelSurface::Cusp(CuspChart)
}
