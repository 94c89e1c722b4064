mod common;

use std::f64::consts::PI;

use common::{rel, simpson};
use isoqec::numerics::{
    cos_sin_halfpi_integral, double_factorial, double_factorial_exact, integrate_adaptive, integrate_with,
    kernel_integral, kernel_integrand, sphere_surface, sum_series, wallis_integral, KernelKind, LogScaled,
    QuadOptions,
};
use proptest::prelude::*;

const SIGMAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.9];

#[test]
fn kernel_closed_forms_match_quadrature_on_grid() {
    for kind in KernelKind::ALL {
        for d in kind.min_d()..=8 {
            for &s in &SIGMAS {
                let closed = kernel_integral::<f64>(kind, d, s).unwrap();
                let opts = QuadOptions::new(1e-12).with_l1_rel_tol(1e-13);
                let q = integrate_with(|t| kernel_integrand(kind, d, s, t), 0.0, PI, &opts).unwrap();
                let err = (closed - q.value).abs() / closed.abs().max(q.l1_norm);
                assert!(err < 1e-9, "{} d={d} sigma={s}: {closed} vs {}", kind.name(), q.value);
            }
        }
    }
}

#[test]
fn kernel_plain_example_against_simpson() {
    let s = 0.5;
    let oracle = simpson(|t| t.sin().powi(2) / (1.0 + s * s - 2.0 * s * t.cos()).powi(2), 0.0, PI, 4000);
    assert!(rel(kernel_integral::<f64>(KernelKind::Plain, 2, s).unwrap(), oracle) < 1e-10);
    assert!(rel(oracle, 2.0 * PI / 3.0) < 1e-10);
}

#[test]
fn quadrature_matches_kernel_at_three_and_point_seven() {
    let f = |t: f64| t.sin().powi(4) / (1.0 + 0.49 - 1.4 * t.cos()).powi(3);
    let q = integrate_adaptive(f, 0.0, PI, 1e-12).unwrap();
    assert!(rel(q.value, kernel_integral::<f64>(KernelKind::Plain, 3, 0.7).unwrap()) < 1e-9);
    assert!(q.error_estimate <= 1e-12 * q.value.abs());
}

#[test]
fn sine_power_integrals_against_simpson() {
    for k in 0..=12u32 {
        let oracle = simpson(|t| t.sin().powi(k as i32), 0.0, PI, 2000);
        assert!(rel(wallis_integral::<f64>(k), oracle) < 1e-11, "k={k}");
    }
    for a in 0..=6u32 {
        for b in 0..=6u32 {
            let oracle = simpson(|t| t.cos().powi(a as i32) * t.sin().powi(b as i32), 0.0, PI / 2.0, 2000);
            assert!(rel(cos_sin_halfpi_integral::<f64>(a, b), oracle) < 1e-11, "a={a} b={b}");
        }
    }
}

#[test]
fn wallis_product_telescopes() {
    for k in (0..=40u32).step_by(2) {
        let p = wallis_integral::<f64>(k) * wallis_integral::<f64>(k + 1);
        assert!(rel(p, 2.0 * PI / f64::from(k + 1)) < 1e-12, "k={k}");
    }
}

#[test]
fn sphere_surfaces_by_shells_and_closed_forms() {
    for dim in 2..=25u32 {
        let shell = sphere_surface::<f64>(dim - 1).unwrap().value() * wallis_integral::<f64>(dim - 1);
        assert!(rel(sphere_surface::<f64>(dim).unwrap().value(), shell) < 1e-12, "dim={dim}");
    }
    // |S_{2k}| = 2(2π)^k/(2k−1)!!, |S_{2k−1}| = (2π)^k/(2k−2)!!
    for k in 1..=12i64 {
        let tau_k = (2.0 * PI).powi(k as i32);
        let even = 2.0 * tau_k / double_factorial::<f64>(2 * k - 1).unwrap().value();
        let odd = tau_k / double_factorial::<f64>(2 * k - 2).unwrap().value();
        assert!(rel(sphere_surface::<f64>(2 * k as u32).unwrap().value(), even) < 1e-13);
        assert!(rel(sphere_surface::<f64>(2 * k as u32 - 1).unwrap().value(), odd) < 1e-13);
    }
}

#[test]
fn double_factorial_pairs_are_factorials() {
    for k in 1..=20i64 {
        let fact: u128 = (1..=k as u128).product();
        assert_eq!(double_factorial_exact(k).unwrap() * double_factorial_exact(k - 1).unwrap(), fact);
    }
    assert!(double_factorial::<f64>(-2).is_err());
}

#[test]
fn large_double_factorials_stay_finite_in_log_space() {
    // ln(1023!!) by direct log summation
    let ln: f64 = (1..=1023).step_by(2).map(|j| (j as f64).ln()).sum();
    let v = double_factorial::<f64>(1023).unwrap();
    assert!(rel(v.ln_abs(), ln) < 1e-14);
    let ratio = (v / double_factorial::<f64>(1022).unwrap()).value();
    let direct: f64 = (1..=511).map(|j| (2 * j + 1) as f64 / (2 * j) as f64).product();
    assert!(rel(ratio, direct) < 1e-12);
}

#[test]
fn geometric_series() {
    let s = sum_series(|k| 0.5f64.powi(k as i32), 1e-14, 1000).unwrap();
    assert!((s - 1.0).abs() < 1e-13);
}

proptest! {
    #[test]
    fn log_scaled_round_trip(m in 1.0f64..10.0, e in -300i32..300) {
        let x = m * 10f64.powi(e);
        prop_assert!(rel(LogScaled::from_value(x).value(), x) <= 1e-14);
        prop_assert!(rel(LogScaled::from_value(-x).value(), -x) <= 1e-14);
    }

    #[test]
    fn log_scaled_product_adds_logs(a in -1e3f64..1e3, b in -1e3f64..1e3) {
        prop_assume!(a != 0.0 && b != 0.0);
        let (la, lb) = (LogScaled::from_value(a), LogScaled::from_value(b));
        let p = la * lb;
        prop_assert!((p.ln_abs() - (la.ln_abs() + lb.ln_abs())).abs() <= 1e-12 * (1.0 + p.ln_abs().abs()));
        prop_assert_eq!(p.value().signum(), (a * b).signum());
    }

    #[test]
    fn quadrature_of_polynomials(c0 in -5.0f64..5.0, c1 in -5.0f64..5.0, c2 in -5.0f64..5.0, b in 0.1f64..4.0) {
        let opts = QuadOptions::new(1e-12).with_l1_rel_tol(1e-13);
        let q = integrate_with(|x| c0 + c1 * x + c2 * x * x, 0.0, b, &opts).unwrap();
        let exact = c0 * b + c1 * b * b / 2.0 + c2 * b * b * b / 3.0;
        prop_assert!((q.value - exact).abs() <= 1e-11 * (1.0 + exact.abs()));
    }
}
