use proptest::prelude::*;
use std::f64::consts::PI;
use wph_core::jacobi1d::{
    line_kernel_energy, periodic_residual, second_term_kernel, second_term_kernel_with, solve_periodic,
    solve_periodic_kernel, solve_segment_with, GreenKernel,
};
use wph_core::qdiff::{FieldKind, FieldOnGeodesic};
use wph_core::quad::Quadrature;
use wph_core::random;

fn lengths() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.5, 1.0, 2.0, 8.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn green_residual(l in lengths(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::trig_field(&mut rng, l, 4, 128).unwrap();
        let sol = solve_periodic(&f).unwrap();
        prop_assert!(periodic_residual(&sol.u, &f).unwrap() < 1e-6 * f.max_abs());
    }

    #[test]
    fn three_way_second_term(l in lengths(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::trig_field(&mut rng, l, 4, 128).unwrap();
        let sol = solve_periodic(&f).unwrap();
        let uf = sol.u.product_integral(&f).unwrap();
        let k = second_term_kernel(&f, &Quadrature::default()).unwrap();
        let scale = sol.energy.abs();
        prop_assert!((sol.energy - uf).abs() < 1e-7 * scale);
        prop_assert!((sol.energy - k).abs() < 1e-7 * scale);
        prop_assert!((uf - k).abs() < 1e-7 * scale);
        prop_assert!(k > 0.0);
    }

    #[test]
    fn kernel_and_spectral_agree(l in lengths(), seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let f = random::trig_field(&mut rng, l, 3, 96).unwrap();
        let a = solve_periodic(&f).unwrap();
        let b = solve_periodic_kernel(&f, &Quadrature::default()).unwrap();
        let diff = a.u.values().iter().zip(b.u.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-8 * a.u.max_abs());
    }

    #[test]
    fn segment_kernel_tends_to_line(l in 2.0f64..60.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        let (y, s) = (0.45 * l * a, 0.45 * l * b);
        let seg = GreenKernel::Segment { length: l }.eval(y, s);
        let line = GreenKernel::Line.eval(y, s);
        let bound = (-(0.5 * l - y.abs().max(s.abs()))).exp();
        prop_assert!((seg - line).abs() < bound, "{} vs {}", (seg - line).abs(), bound);
        // symmetric kernel
        prop_assert_eq!(seg, GreenKernel::Segment { length: l }.eval(s, y));
    }
}

/// Single cosine mode: U = F/(1 + k²), energy = ∫ F²/(1 + k²) = (L/2)/(1 + k²).
#[test]
fn cosine_mode_oracle() {
    for &l in &[0.5, 1.0, 2.0, 8.0] {
        for m in 0..4 {
            let k = 2.0 * PI * m as f64 / l;
            let f = FieldOnGeodesic::sample(FieldKind::ImPhiOverG, 0.0, l, 129, true, |s| (k * s).cos()).unwrap();
            let sol = solve_periodic(&f).unwrap();
            let exact = if m == 0 { l } else { 0.5 * l } / (1.0 + k * k);
            assert!((sol.energy - exact).abs() < 1e-12 * exact, "L={l} m={m}: {} vs {exact}", sol.energy);
            let mid = sol.u.values()[32];
            assert!((mid - (k * f.s(32)).cos() / (1.0 + k * k)).abs() < 1e-12);
        }
    }
}

/// Constant F on a circle of length L: U ≡ F, energy F²L; the kernel integral
/// of the circle kernel is 1 (the row sum of the Green's function of 1 − d²).
#[test]
fn circle_kernel_row_sum() {
    let quad = Quadrature::default();
    for &l in &[0.5, 3.0, 40.0] {
        let k = GreenKernel::Circle { length: l };
        let row = quad.integrate(0.0, 0.3, |t| k.eval(0.3, t)) + quad.integrate(0.3, l, |t| k.eval(0.3, t));
        assert!((row + 1.0).abs() < 1e-10, "{row}");
        let e = second_term_kernel_with(|_| 2.0, 0.0, l, &quad).unwrap();
        assert!((e - 4.0 * l).abs() < 1e-9 * l);
    }
}

/// F ≡ 1 with zero boundary data on [−L/2, L/2]: U = 1 − cosh y / cosh(L/2).
#[test]
fn segment_closed_form() {
    let l = 6.0;
    let sol = solve_segment_with(|_| 1.0, l, 601, (0.0, 0.0)).unwrap();
    for i in (0..sol.u.len()).step_by(50) {
        let y = sol.u.s(i);
        let exact = 1.0 - y.cosh() / (0.5 * l).cosh();
        assert!((sol.u.values()[i] - exact).abs() < 1e-12);
    }
    // with boundary data 1 the solution is U ≡ 1 and the homogeneous part vanishes
    let one = solve_segment_with(|_| 1.0, l, 601, (1.0, 1.0)).unwrap();
    assert!(one.u.values().iter().all(|u| (u - 1.0).abs() < 1e-12));
    let (a, b) = one.homogeneous.unwrap();
    // homogeneous part a cosh y matches the boundary: a = sech(L/2)
    assert!((a - 1.0 / (0.5 * l).cosh()).abs() < 1e-14);
    assert!(b.abs() < 1e-15);
}

/// Line kernel energy for F = e^{−s²}: ½∬ e^{−|s−y|−s²−y²} = (π/2) e^{1/2} erfc(1/√2).
#[test]
fn line_energy_oracle() {
    let exact = 0.8217724400620384;
    let e = line_kernel_energy(|s: f64| (-s * s).exp(), -12.0, 12.0, &Quadrature::new(16, 8.0, 64));
    assert!((e - exact).abs() < 1e-10, "{e}");
}
