//! Quadrature rules: Gauss–Legendre (single and composite), periodic
//! trapezoid and Simpson on uniform samples.

use std::f64::consts::PI;

/// An n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(c + r * x);
        }
        acc * r
    }

    /// Same rule on `panels` equal subintervals of [a, b].
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for k in 0..panels {
            let lo = a + h * k as f64;
            acc += self.integrate(lo, lo + h, &mut f);
        }
        acc
    }

    /// Abscissae and weights of the composite rule, in increasing order.
    pub fn composite_points(&self, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let r = 0.5 * h;
        let mut out = Vec::with_capacity(panels * self.order());
        for k in 0..panels {
            let c = a + h * k as f64 + r;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                out.push((c + r * x, w * r));
            }
        }
        out
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite Gauss–Legendre sized by interval length.
///
/// Defaults: 16-point panels, 64 nodes per unit length, at least 128 nodes.
#[derive(Debug, Clone)]
pub struct Quadrature {
    rule: GaussLegendre,
    pub nodes_per_unit: f64,
    pub min_nodes: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self::new(16, 64.0, 128)
    }
}

impl Quadrature {
    pub fn new(panel_order: usize, nodes_per_unit: f64, min_nodes: usize) -> Self {
        Self { rule: GaussLegendre::new(panel_order), nodes_per_unit, min_nodes }
    }

    pub fn rule(&self) -> &GaussLegendre {
        &self.rule
    }

    pub fn panels_for(&self, len: f64) -> usize {
        let order = self.rule.order() as f64;
        let want = (self.nodes_per_unit * len.abs()).max(self.min_nodes as f64);
        ((want / order).ceil() as usize).max(1)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.rule.composite(a, b, self.panels_for(b - a), f)
    }

    pub fn points(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        self.rule.composite_points(a, b, self.panels_for(b - a))
    }
}

/// Trapezoid rule for one period of periodic samples `v[0..n]` (no repeated endpoint).
pub fn trapezoid_periodic(values: &[f64], period: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() * period / values.len() as f64
}

/// Composite Simpson on an odd number of uniform samples; falls back to the
/// trapezoid rule with a cubic end correction when the count is even.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        _ if n % 2 == 1 => {
            let mut acc = values[0] + values[n - 1];
            for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
                acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            acc * h / 3.0
        }
        _ => {
            // Simpson on the first n-3 intervals plus a 3/8 rule on the last three.
            let head = simpson(&values[..n - 3], h);
            let t = &values[n - 4..];
            head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])
        }
    }
}

/// Trapezoid rule on uniform open samples.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}
