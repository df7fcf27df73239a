use std::f64::consts::PI;

use extlap::specfun::bessel::{bessel_jy_ladder, bessel_jy_with, Evaluation};
use extlap::specfun::*;
use proptest::prelude::*;

fn order(nu: f64) -> BesselOrder {
    BesselOrder::new(nu).unwrap()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[test]
fn matches_high_precision_reference_table() {
    let text = include_str!("data/bessel_reference.csv");
    let mut count = 0;
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let (nu, x, jref, yref) = (v[0], v[1], v[2], v[3]);
        let (j, y) = bessel_jy(order(nu), x).unwrap();
        // Near zeros only the error relative to the local amplitude is meaningful.
        let amp = jref.hypot(yref);
        assert!((j - jref).abs() <= 1e-12 * amp, "J_{nu}({x}) = {j}, want {jref}");
        assert!((y - yref).abs() <= 1e-12 * amp, "Y_{nu}({x}) = {y}, want {yref}");
        assert!((j - jref).abs() <= 1e-10 * jref.abs().max(1e-3 * amp), "J_{nu}({x})");
        count += 1;
    }
    assert!(count > 300);
}

fn five_point(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

#[test]
fn wronskian_by_finite_differences() {
    for nu in [0.0, 0.3, 0.5, 1.0, 1.5, 2.7, 5.0, 12.5] {
        let o = order(nu);
        for x in log_grid(0.05, 50.0, 40) {
            // Relative steps near 0, capped where the functions oscillate.
            let h = (1e-3 * x).min(2e-3);
            let j = |z: f64| bessel_j(o, z).unwrap();
            let y = |z: f64| bessel_y(o, z).unwrap();
            let w = j(x) * five_point(y, x, h) - five_point(j, x, h) * y(x);
            let err = (w - 2.0 / (PI * x)).abs();
            assert!(err <= 1e-9 * (1.0 + 1.0 / x), "nu={nu} x={x} err={err:e}");
        }
    }
    // The documented example point.
    let o = order(1.5);
    let j = |z: f64| bessel_j(o, z).unwrap();
    let y = |z: f64| bessel_y(o, z).unwrap();
    let w = j(2.0) * five_point(y, 2.0, 1e-3) - five_point(j, 2.0, 1e-3) * y(2.0);
    assert!((w - 1.0 / PI).abs() < 1e-10);
}

#[test]
fn half_integer_closed_forms_agree_with_general_path() {
    for nu in [0.5, 1.5, 2.5] {
        for x in log_grid(1e-3, 100.0, 500) {
            let (jc, yc) = bessel_jy_with(order(nu), x, Evaluation::Auto).unwrap();
            let (jg, yg) = bessel_jy_with(order(nu), x, Evaluation::General).unwrap();
            let amp = jc.hypot(yc);
            assert!((jc - jg).abs() <= 1e-10 * jc.abs().max(1e-3 * amp), "J nu={nu} x={x}");
            assert!((yc - yg).abs() <= 1e-10 * yc.abs().max(1e-3 * amp), "Y nu={nu} x={x}");
        }
    }
}

/// Largest ratio |value| / envelope over a scan, i.e. the best constant in the bound.
fn fitted_constant(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    pairs.map(|(v, env)| v.abs() / env).fold(0.0, f64::max)
}

#[test]
fn crude_bessel_envelopes() {
    for nu in [0.5, 1.0, 1.5] {
        let xs = log_grid(1e-3, 50.0, 2000);
        let cj = fitted_constant(
            xs.iter()
                .map(|&x| (bessel_j(order(nu), x).unwrap(), x.powf(nu).min(x.powf(-0.5)))),
        );
        let cy = fitted_constant(
            xs.iter()
                .map(|&x| (bessel_y(order(nu), x).unwrap(), x.powf(-nu).max(x.powf(-0.5)))),
        );
        println!("nu={nu}: C_J={cj:.3} C_Y={cy:.3}");
        assert!(cj < 10.0 && cy < 10.0);
    }
}

#[test]
fn sine_zero_and_small_argument_examples() {
    assert!(bessel_j(order(0.5), PI).unwrap().abs() < 1e-12);
    let x: f64 = 1e-4;
    let lead = (x / 2.0).sqrt() / gamma_fn(1.5).unwrap();
    assert!(((bessel_j(order(0.5), x).unwrap() - lead) / lead).abs() < 1e-6);
    assert!(bessel_y(order(0.5), PI / 2.0).unwrap().abs() < 1e-12);
}

#[test]
fn eigenmode_vanishes_on_the_boundary() {
    for d in [3, 4, 5] {
        for ell in [0, 1, 3] {
            for lambda in log_grid(1e-4, 64.0, 50) {
                let q = EigenmodeQuery::new(d, ell, 1.0, lambda).unwrap();
                assert_eq!(eigenmode(q).unwrap(), 0.0);
                // Just off the boundary the value is O(r − 1).
                let q = EigenmodeQuery::new(d, ell, 1.0 + 1e-9, lambda).unwrap();
                assert!(eigenmode(q).unwrap().abs() < 1e-7);
            }
        }
    }
}

#[test]
fn eigenmode_envelope_in_three_dimensions() {
    let lambda = 0.5;
    let c = fitted_constant(log_grid(1.0 + 1e-6, 100.0, 3000).into_iter().map(|r| {
        let u = eigenmode(EigenmodeQuery::new(3, 0, r, lambda).unwrap()).unwrap();
        (u, 1f64.min(1.0 / (lambda * r)))
    }));
    println!("|u| <= {c:.3} (1 ∧ (λr)^-1)");
    assert!(c < 10.0);
}

#[test]
fn eigenmode_derivative_envelope() {
    let c = fitted_constant(log_grid(1.0 + 1e-6, 100.0, 3000).into_iter().map(|r| {
        (eigenmode_deriv(EigenmodeQuery::new(3, 0, r, 0.7).unwrap()).unwrap(), 1.0)
    }));
    println!("|u'| <= {c:.3}");
    assert!(c < 10.0);
}

#[test]
fn eigenmode_derivative_matches_finite_differences() {
    for (d, r, lambda) in [(3, 2.0, 0.7), (4, 1.3, 2.5), (5, 6.0, 0.05)] {
        let u = |r: f64| eigenmode(EigenmodeQuery::new(d, 0, r, lambda).unwrap()).unwrap();
        let fd = five_point(u, r, 1e-3);
        let exact = eigenmode_deriv(EigenmodeQuery::new(d, 0, r, lambda).unwrap()).unwrap();
        assert!((fd - exact).abs() < 1e-9 * (1.0 + exact.abs()), "d={d}");
    }
}

#[test]
fn derivative_low_frequency_limit() {
    let target = 2.0 / PI * 0.25;
    let mut errs = Vec::new();
    for n in 1..=20 {
        let lambda = 2f64.powi(-n);
        let v = eigenmode_deriv(EigenmodeQuery::new(3, 0, 2.0, lambda).unwrap()).unwrap();
        errs.push((v - target).abs());
    }
    assert!(errs.last().unwrap() < &1e-9);
    assert!(errs.windows(2).skip(3).all(|w| w[1] <= w[0] + 1e-15));

    let v = eigenmode_deriv(EigenmodeQuery::new(4, 0, 3.0, 2f64.powi(-12)).unwrap()).unwrap();
    let target = 2.0 / PI / 27.0;
    assert!(((v - target) / target).abs() < 1e-3);
}

#[test]
fn sector_modes_solve_the_radial_equation() {
    // −u'' − (d−1)/r u' + ℓ(ℓ+d−2)/r² u = λ² u, checked by central differences.
    for (d, ell) in [(3u32, 0u32), (3, 2), (4, 1), (5, 3)] {
        let lambda = 1.3;
        let u = |r: f64| eigenmode(EigenmodeQuery::new(d, ell, r, lambda).unwrap()).unwrap();
        for r in [1.2, 2.0, 4.5] {
            let h = 1e-3;
            let u2 = (-u(r + 2.0 * h) + 16.0 * u(r + h) - 30.0 * u(r) + 16.0 * u(r - h)
                - u(r - 2.0 * h))
                / (12.0 * h * h);
            let u1 = five_point(u, r, h);
            let dl = d as f64;
            let el = ell as f64;
            let lhs = -u2 - (dl - 1.0) / r * u1 + el * (el + dl - 2.0) / (r * r) * u(r);
            assert!((lhs - lambda * lambda * u(r)).abs() < 1e-6, "d={d} ell={ell} r={r}");
        }
    }
}

proptest! {
    #[test]
    fn cross_product_identity(nu in 0.0f64..30.0, x in 0.01f64..80.0) {
        let mut j = [0.0; 2];
        let mut y = [0.0; 2];
        bessel_jy_ladder(order(nu), x, &mut j, &mut y).unwrap();
        let lhs = j[1] * y[0] - j[0] * y[1];
        let scale = 1.0 + (j[1] * y[0]).abs() + (j[0] * y[1]).abs();
        prop_assume!(scale.is_finite());
        prop_assert!((lhs - 2.0 / (PI * x)).abs() <= 1e-11 * scale, "lhs={} want={}", lhs, 2.0 / (PI * x));
    }

    #[test]
    fn gamma_recurrence(x in 0.05f64..29.0) {
        let g = gamma_fn(x).unwrap();
        let g1 = gamma_fn(x + 1.0).unwrap();
        prop_assert!(((g1 - x * g) / g1).abs() < 1e-12);
    }
}
