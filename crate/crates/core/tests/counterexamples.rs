use extlap::counterexamples::*;
use extlap::domain::DomainSpec;
use extlap::quadrature::rules::gl16_composite;
use extlap::transforms::SpectralGrid;
use extlap::Error;

#[test]
fn cutoff_function_shape() {
    let spec = CutoffSpec::new(0.05, 10.0).unwrap();
    let chi = cutoff_chi(spec, 3).unwrap();
    assert_eq!(chi.eval(1.0), 0.0);
    assert_eq!(chi.eval(0.5 * (1.0 + 0.1 + 10.0)), 1.0);
    assert_eq!(chi.eval(21.0), 0.0);
    let mut slope: f64 = 0.0;
    for i in 0..=20000 {
        let s = 25.0 * i as f64 / 20000.0;
        let c = spec.at(s);
        assert!((0.0..=1.0).contains(&c[0]));
        slope = slope.max(c[1].abs());
    }
    for i in 0..=2000 {
        slope = slope.max(spec.at(0.05 + 0.05 * i as f64 / 2000.0)[1].abs());
    }
    assert!(slope <= PHI_SLOPE_MAX / 0.05 * (1.0 + 1e-12));
    assert!(slope >= 0.99 * PHI_SLOPE_MAX / 0.05);
}

#[test]
fn cutoff_gradient_against_mode_scales() {
    // ‖χ′u‖_4 ≲ ε^{1/4} + R^{3/4−1} while both cutoffs sit where u ≈ (2/π)(r − 1)/r.
    let lambda = 1e-4;
    let mut ratios = Vec::new();
    for &(eps, r_outer) in &[(0.2, 5.0), (0.05, 20.0), (0.01, 80.0), (1e-3, 300.0), (1e-4, 1000.0)] {
        let m = TruncatedMode::new(lambda, CutoffSpec::new(eps, r_outer).unwrap()).unwrap();
        let g = |s: f64| {
            let c = m.cutoff.at(s)[1];
            (c * m.mode(1.0 + s)).powi(4) * (1.0 + s).powi(2)
        };
        let i = gl16_composite(g, eps, 2.0 * eps, 64) + gl16_composite(g, r_outer - 1.0, 2.0 * r_outer - 1.0, 256);
        let norm = (4.0 * std::f64::consts::PI * i).powf(0.25);
        ratios.push(norm / (eps.powf(0.25) + r_outer.powf(-0.25)));
    }
    let mx = ratios.iter().copied().fold(0.0, f64::max);
    let mn = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(mx < 5.0 && mx / mn < 5.0, "{ratios:?}");
}

#[test]
fn exponent_two_identities() {
    // At p = 2 integration by parts and Plancherel make the three half-power norms equal,
    // and ‖(−Δ_Ω)^{1/2} f‖² ≤ ‖f‖‖Δf‖ is Cauchy–Schwarz.
    for (l, e, r) in [(0.5, 0.2, 5.0), (1.0 / 64.0, 1.0 / 64.0, 1024.0)] {
        let m = TruncatedMode::new(l, CutoffSpec::new(e, r).unwrap()).unwrap();
        let n = mode_norms(&m, 2.0).unwrap();
        assert!((n.dirichlet_half_power - n.gradient).abs() < 1e-8 * n.gradient, "{n:?}");
        assert!((n.whole_half_power - n.gradient).abs() < 1e-8 * n.gradient, "{n:?}");
        assert!(n.dirichlet_half_power.powi(2) <= n.f * n.laplacian);
    }
}

#[test]
fn half_line_route_matches_spectral_transforms() {
    let m = TruncatedMode::new(0.5, CutoffSpec::new(0.2, 5.0).unwrap()).unwrap();
    let n = mode_norms(&m, 4.0).unwrap();
    let grid = SpectralGrid::default();
    let b = spectral_half_power_norm(&m, 4.0, DomainSpec::exterior(3).unwrap(), &grid).unwrap();
    let a = spectral_half_power_norm(&m, 4.0, DomainSpec::whole(3).unwrap(), &grid).unwrap();
    assert!((b.value - n.dirichlet_half_power).abs() < 1e-4 * b.value, "{} vs {}", b.value, n.dirichlet_half_power);
    assert!((a.value - n.whole_half_power).abs() < 1e-4 * a.value, "{} vs {}", a.value, n.whole_half_power);
    let big = TruncatedMode::new(0.01, CutoffSpec::new(0.01, 64.0).unwrap()).unwrap();
    assert!(spectral_half_power_norm(&big, 4.0, DomainSpec::exterior(3).unwrap(), &grid).is_err());
}

#[test]
fn gradient_counterexample_at_p4() {
    let start = std::time::Instant::now();
    let schedule = default_schedule();
    let rows = gradient_counterexample(3, 4.0, &schedule).unwrap();
    assert!(start.elapsed().as_secs() < 600);
    assert_eq!(rows.len(), schedule.len());
    let limit = gradient_limit(4.0);
    assert!((limit - 0.8015674773).abs() < 1e-9);
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!(last.b < first.b / 10.0, "B: {} → {}", first.b, last.b);
    assert!(last.ratio > 10.0, "final ratio {}", last.ratio);
    assert!(rows.windows(2).all(|w| w[1].b < w[0].b));
    for e in &rows {
        assert!(e.mode_error < 1e-10);
        assert!(e.a_stable(), "n = {}: {} vs {}", e.n, e.a, e.a_refined);
        assert!(e.a_riesz / e.a < 5.0 && e.a / e.a_riesz < 5.0);
        assert!(e.b <= e.interp_bound);
        if e.n >= 10 {
            assert!(e.a > 0.5 * limit);
            assert!((e.a - limit).abs() < 0.1 * limit);
        }
    }
    // With R_n = 2^{n+4} the untruncated mode keeps most of its L^4 mass beyond R.
    assert!(rows.iter().all(|e| !e.tail_ok));
    let csv = schedule_csv(&rows);
    assert_eq!(csv.lines().count(), rows.len() + 1);
    assert!(csv.starts_with("n,lambda,eps,R,A,B,A_over_B"));
}

#[test]
fn gradient_counterexample_at_p6() {
    let schedule: Vec<ScheduleParams> = default_schedule().into_iter().step_by(4).collect();
    let rows = gradient_counterexample(3, 6.0, &schedule).unwrap();
    let limit = gradient_limit(6.0);
    assert!(rows.windows(2).all(|w| w[1].b < w[0].b && w[1].ratio > w[0].ratio));
    assert!(rows.last().unwrap().a > 0.5 * limit);
}

#[test]
fn gradient_counterexample_rejects_bad_input() {
    let s = default_schedule();
    assert!(matches!(gradient_counterexample(4, 5.0, &s), Err(Error::Unsupported(_))));
    assert!(gradient_counterexample(3, 3.0, &s).is_err());
    let mut rev = s.clone();
    rev.reverse();
    assert!(gradient_counterexample(3, 4.0, &rev).is_err());
    assert!(CutoffSpec::new(0.25, 8.0).is_err());
}

#[test]
fn hardy_endpoint_diverges() {
    let r = hardy_endpoint_run(3, 1.5, 1.9, 1..=30).unwrap();
    assert!((r.predicted_slope - 0.35).abs() < 1e-12);
    assert!((0.25..=0.45).contains(&r.increment_slope), "{}", r.increment_slope);
    assert!(r.divergent);
    // Linear vanishing at the boundary, bounded below.
    assert!(r.boundary_slope_min > 0.1);
    assert!(r.denominator.value.is_finite() && r.denominator.value > 0.0 && !r.denominator.is_divergent());
    let v: Vec<f64> = r.partials.iter().map(|p| p.1).collect();
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    assert!(v.last().unwrap() / v[v.len() - 11] > 2.0);
}

#[test]
fn hardy_endpoint_control_converges() {
    let r = hardy_endpoint_run(3, 1.5, 1.2, 1..=30).unwrap();
    assert!(!r.divergent);
    assert!(r.increment_slope < -0.5);
    assert!(r.partial_slope.abs() < 0.01);
    let v: Vec<f64> = r.partials.iter().map(|p| p.1).collect();
    assert!((v[v.len() - 1] - v[v.len() - 5]).abs() < 1e-5 * v[v.len() - 1]);
}

#[test]
fn hardy_endpoint_needs_enough_points() {
    assert!(matches!(hardy_endpoint_run(3, 1.5, 1.9, 1..=2), Err(Error::NonConvergence { .. })));
}
