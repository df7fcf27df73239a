use std::f64::consts::PI;

use extlap::domain::DomainSpec;
use extlap::family::family_functions;
use extlap::heat::heat_apply_radial;
use extlap::quadrature::{
    integrate, integrate_breakpoints, integrate_semiinfinite, lp_norm_radial, Decay, QuadOptions, RadialMeasure, Weight,
};
use extlap::radial::{bump_profile, RadialFunction, Support};
use extlap::specfun::gamma_fn;
use extlap::transforms::*;

fn bump(d: u32, ell: u32, center: f64, half_width: f64) -> RadialFunction {
    RadialFunction::analytic(d, ell, bump_profile(center, half_width, 12.0), Support::compact(center - half_width, center + half_width))
        .unwrap()
}

fn rel_l2(reference: &RadialFunction, other: impl Fn(f64) -> f64) -> f64 {
    let grid = reference.grid().expect("sampled").clone();
    let (vals, _) = reference.samples().unwrap();
    let dm1 = reference.d() as i32 - 1;
    let (mut num, mut den) = (0.0, 0.0);
    for ((r, w), v) in grid.nodes().iter().zip(grid.weights()).zip(vals) {
        let m = w * r.powi(dm1);
        num += m * (other(*r) - v).powi(2);
        den += m * v * v;
    }
    (num / den).sqrt()
}

fn l2(f: &RadialFunction) -> f64 {
    let grid = f.grid().unwrap();
    let (v, _) = f.samples().unwrap();
    let dm1 = f.d() as i32 - 1;
    grid.nodes().iter().zip(grid.weights()).zip(v).map(|((r, w), v)| w * r.powi(dm1) * v * v).sum::<f64>().sqrt()
}

/// −f″ − ((d−1)/r) f′ + ℓ(ℓ+d−2)/r² f with fourth-order central differences.
fn sector_operator(f: &RadialFunction, r: f64) -> f64 {
    let h = 2e-3;
    let v = |k: f64| f.eval(r + k * h);
    let d1 = (v(-2.0) - 8.0 * v(-1.0) + 8.0 * v(1.0) - v(2.0)) / (12.0 * h);
    let d2 = (-v(-2.0) + 16.0 * v(-1.0) - 30.0 * v(0.0) + 16.0 * v(1.0) - v(2.0)) / (12.0 * h * h);
    let (d, l) = (f.d() as f64, f.ell() as f64);
    -d2 - (d - 1.0) / r * d1 + l * (l + d - 2.0) / (r * r) * v(0.0)
}

#[test]
fn weber_round_trip_and_plancherel() {
    for &(d, ell) in &[(3u32, 0u32), (3, 2), (4, 0), (5, 1)] {
        let f = bump(d, ell, 3.0, 1.0);
        let spec = weber_forward(&f).unwrap();
        let back = weber_inverse(&spec).unwrap();
        assert!(rel_l2(&back, |r| f.eval(r)) < 1e-6, "d={d} ell={ell}");
        let norm = l2(&back);
        assert!((spec.l2_norm() - norm).abs() < 1e-6 * norm);
    }
    for f in family_functions(3).unwrap() {
        let spec = weber_forward(&f).unwrap();
        let direct = lp_norm_radial(&f, 2.0, &RadialMeasure::exterior(3).unwrap(), &Weight::None).unwrap().value;
        // The spectral norm omits the sphere area.
        let spectral = spec.l2_norm() * (4.0 * PI).sqrt();
        assert!((spectral - direct).abs() < 1e-6 * direct);
    }
}

#[test]
fn squared_frequency_is_the_sector_operator() {
    for &(d, ell, domain) in &[
        (3u32, 0u32, DomainSpec::exterior(3).unwrap()),
        (3, 1, DomainSpec::exterior(3).unwrap()),
        (4, 0, DomainSpec::exterior(4).unwrap()),
        (3, 0, DomainSpec::whole(3).unwrap()),
    ] {
        let f = bump(d, ell, 2.6, 0.9);
        let lap = apply_multiplier(&Multiplier::power(2.0), &f, domain).unwrap();
        let (mut err, mut peak) = (0.0f64, 0.0f64);
        for i in 0..200 {
            let r = 1.75 + 1.7 * i as f64 / 199.0;
            let fd = sector_operator(&f, r);
            err = err.max((fd - lap.eval(r)).abs());
            peak = peak.max(fd.abs());
        }
        assert!(err < 1e-4 * peak, "d={d} ell={ell}: {:e}", err / peak);
    }
}

#[test]
fn fractional_power_identities() {
    let dom = DomainSpec::exterior(3).unwrap();
    let f = &family_functions(3).unwrap()[2];
    let zero = frac_power(0.0, f, dom).unwrap();
    assert!(rel_l2(&zero, |r| f.eval(r)) < 1e-8);
    let two = frac_power(2.0, f, dom).unwrap();
    let twice = frac_power(1.0, &frac_power(1.0, f, dom).unwrap(), dom).unwrap();
    assert!(rel_l2(&two, |r| twice.eval(r)) < 1e-5);
    assert!(frac_power(4.5, f, dom).is_err());

    let spec = weber_forward(f).unwrap();
    let composed = spec.apply(&Multiplier::heat(0.1)).apply(&Multiplier::power(1.5));
    let product = spec.apply(&Multiplier::heat(0.1).product(&Multiplier::power(1.5)));
    let a = composed.inverse().unwrap();
    let b = product.inverse().unwrap();
    assert!(rel_l2(&b, |r| a.eval(r)) < 1e-12);
    // Through the radial side: apply, synthesize, transform again, apply.
    let mid = apply_multiplier(&Multiplier::power(1.5), f, dom).unwrap();
    let c = apply_multiplier(&Multiplier::heat(0.1), &mid, dom).unwrap();
    assert!(rel_l2(&b, |r| c.eval(r)) < 1e-5);
}

#[test]
fn whole_space_integer_power_is_minus_laplacian() {
    let dom = DomainSpec::whole(4).unwrap();
    let f = bump(4, 0, 1.5, 1.0);
    let lap = frac_power(2.0, &f, dom).unwrap();
    let (mut err, mut peak) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let r = 0.6 + 1.8 * i as f64 / 99.0;
        let fd = sector_operator(&f, r);
        err = err.max((fd - lap.eval(r)).abs());
        peak = peak.max(fd.abs());
    }
    assert!(err < 1e-4 * peak);
}

#[test]
fn identity_and_heat_multipliers() {
    let dom = DomainSpec::exterior(4).unwrap();
    let f = &family_functions(4).unwrap()[9];
    let same = apply_multiplier(&Multiplier::identity(), f, dom).unwrap();
    assert!(rel_l2(&same, |r| f.eval(r)) < 1e-6);
    let a = apply_multiplier(&Multiplier::heat(0.3), f, dom).unwrap();
    let b = heat_apply_radial(f, 0.3, dom).unwrap();
    assert!(rel_l2(&a, |r| b.eval(r)) < 1e-6);
}

#[test]
fn hankel_gaussian_round_trip_and_closed_form() {
    let g = RadialFunction::analytic(3, 0, |r| (-r * r).exp(), Support::compact(0.0, 24.0)).unwrap();
    let spec = hankel_forward(&g).unwrap();
    let back = hankel_inverse(&spec).unwrap();
    assert!(rel_l2(&back, |r| (-r * r).exp()) < 1e-8);
    // d = 3, ℓ = 0 is the sine transform: F(λ) = √(2/π)/λ ∫ r sin(λr) e^{−r²} dr = e^{−λ²/4}/(2√2).
    for (i, &lambda) in spec.lambdas().iter().enumerate().step_by(97) {
        let closed = (-lambda * lambda / 4.0).exp() / (2.0 * 2f64.sqrt());
        let direct = (2.0 / PI).sqrt() / lambda
            * integrate_semiinfinite(|r| r * (lambda * r).sin() * (-r * r).exp(), 0.0, 1e-13, Decay::Gaussian { sigma: 1.0 })
                .unwrap()
                .value;
        assert!((closed - direct).abs() < 1e-12, "λ={lambda}");
        assert!((spec.value(i).re - closed).abs() < 1e-10, "λ={lambda}");
    }
}

#[test]
fn hankel_heat_multiplier_is_gaussian_convolution() {
    let dom = DomainSpec::whole(3).unwrap();
    let f = bump(3, 0, 2.0, 0.8);
    let t = 0.15;
    let evolved = apply_multiplier(&Multiplier::heat(t), &f, dom).unwrap();
    let g1 = |z: f64| (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    for &r in &[0.3, 1.0, 1.7, 2.0, 2.6, 3.5] {
        // Radial functions in ℝ³: (e^{tΔ}f)(r) = r^{−1} ∫₀^∞ [G(r−s) − G(r+s)] s f(s) ds.
        let conv = integrate(|s| (g1(r - s) - g1(r + s)) * s * f.eval(s), 1.2, 2.8, 1e-13).unwrap().value / r;
        assert!((evolved.eval(r) - conv).abs() < 1e-6 * conv.abs().max(1e-3), "r={r}");
    }
}

#[test]
fn imaginary_powers_are_polynomially_bounded() {
    let dom = DomainSpec::exterior(3).unwrap();
    let measure = RadialMeasure::exterior(3).unwrap();
    let mut worst = [0.0f64; 2];
    for f in family_functions(3).unwrap() {
        let base = lp_norm_radial(&f, 4.0, &measure, &Weight::None).unwrap().value;
        for (k, tau) in [1.0, 2.0].into_iter().enumerate() {
            let g = apply_multiplier(&Multiplier::imaginary_power(tau), &f, dom).unwrap();
            let n = lp_norm_radial(&g, 4.0, &measure, &Weight::None).unwrap().value;
            assert!(n.is_finite() && n > 0.0);
            worst[k] = worst[k].max(n / base);
        }
    }
    // Mikhlin constants of λ^{iτ} grow like τ^k; the observed ratios stay within that.
    for (k, tau) in [1.0f64, 2.0].into_iter().enumerate() {
        assert!(worst[k] < 10.0 * (1.0 + tau).powi(3), "τ={tau}: {}", worst[k]);
    }
}

/// Riesz potential by subordination, e^{tΔ} from the d = 3 image kernel:
/// (−Δ)^{−s/2} f(r) = Γ(s/2)^{−1} ∫₀^∞ t^{s/2−1} (e^{tΔ}f)(r) dt.
fn riesz_by_subordination(f: &RadialFunction, s: f64, r: f64, lo: f64, hi: f64) -> f64 {
    let g1 = |z: f64, t: f64| (-z * z / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
    let heat = |t: f64| {
        let inner = QuadOptions::with_tol(1e-10).abs(1e-17);
        // A break at q = r resolves the narrow peak of short times.
        let mut pts = vec![lo];
        pts.extend([r - 5.0 * t.sqrt(), r, r + 5.0 * t.sqrt()].into_iter().filter(|&q| q > lo && q < hi));
        pts.push(hi);
        integrate_breakpoints(|q| (g1(r - q, t) - g1(r + q - 2.0, t)) * q * f.eval(q), &pts, &inner).unwrap().value / r
    };
    let a = s / 2.0;
    // t = u^{1/a} absorbs the t^{a−1} singularity on [0, 1].
    let near = integrate(|u| if u > 0.0 { heat(u.powf(1.0 / a)) / a } else { 0.0 }, 0.0, 1.0, 1e-9).unwrap().value;
    let far = integrate_semiinfinite(|t| t.powf(a - 1.0) * heat(t), 1.0, 1e-9, Decay::Power { q: 2.5 - a }).unwrap().value;
    (near + far) / gamma_fn(a).unwrap()
}

#[test]
fn negative_powers_agree_with_subordination() {
    let dom = DomainSpec::exterior(3).unwrap();
    let f = bump(3, 0, 2.2, 0.6);
    for &s in &[0.5, 1.5] {
        let (spectral, share) = riesz_potential_spectral(s, &f, dom, &SpectralGrid::default(), 1e-2).unwrap();
        assert!(share < 0.5, "s={s}: small-frequency share {share}");
        for &r in &[1.3, 2.2, 3.0, 5.0] {
            let oracle = riesz_by_subordination(&f, s, r, 1.6, 2.8);
            let v = spectral.eval(r);
            assert!((v - oracle).abs() < 1e-4 * oracle.abs(), "s={s} r={r}: {v} vs {oracle}");
        }
    }
}

#[test]
fn custom_grids_and_domains_are_validated() {
    let f = bump(3, 0, 3.0, 1.0);
    assert!(forward(&f, DomainSpec::whole(4).unwrap(), &SpectralGrid::default()).is_err());
    let bad = SpectralGrid { lambda_max: 5.0, ..SpectralGrid::default() };
    assert!(weber_forward_with(&f, &bad).is_err());
    let coarse = weber_forward_with(&f, &SpectralGrid::coarse()).unwrap();
    assert!(rel_l2(&coarse.inverse().unwrap(), |r| f.eval(r)) < 1e-6);
    let spec = weber_forward(&f).unwrap();
    assert!(hankel_inverse(&spec).is_err());
    let pointwise = spec.inverse_pointwise().unwrap();
    assert_eq!(pointwise.eval(1.0), 0.0);
    assert!((pointwise.eval(3.0) - 1.0).abs() < 1e-6);
}
