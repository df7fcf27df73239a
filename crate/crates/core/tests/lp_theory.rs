use extlap::domain::DomainSpec;
use extlap::family::family_functions;
use extlap::fit::{fit_upper, DEFAULT_RATE_RANGE};
use extlap::heat::heat_apply_radial;
use extlap::lp_theory::*;
use extlap::radial::{bump_profile, RadialFunction, Support};
use extlap::transforms::weber_forward;

fn spread(v: &[f64]) -> f64 {
    let mx = v.iter().copied().fold(0.0, f64::max);
    let mn = v.iter().copied().fold(f64::INFINITY, f64::min);
    mx / mn
}

#[test]
fn heat_projections_telescope() {
    let dom = DomainSpec::exterior(3).unwrap();
    let f = &family_functions(3).unwrap()[1];
    let range = DyadicRange::new(-2, 5).unwrap();
    let mut acc: Option<Vec<f64>> = None;
    for n in range.frequencies() {
        let p = lp_project(f, n, ProjectorKind::heat(1), dom).unwrap();
        let (v, _) = p.samples().unwrap();
        match &mut acc {
            None => acc = Some(v.to_vec()),
            Some(a) => a.iter_mut().zip(v).for_each(|(x, y)| *x += y),
        }
    }
    let hi = heat_apply_radial(f, 4f64.powi(-5), dom).unwrap();
    let lo = heat_apply_radial(f, 4.0 * 4f64.powi(2), dom).unwrap();
    let (hv, _) = hi.samples().unwrap();
    let (lv, _) = lo.samples().unwrap();
    let acc = acc.unwrap();
    let err = acc.iter().zip(hv.iter().zip(lv)).map(|(a, (h, l))| (a - (h - l)).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8, "{err:e}");
}

#[test]
fn bump_pieces_partition_unity_on_the_frequency_grid() {
    let f = &family_functions(3).unwrap()[0];
    let spec = weber_forward(f).unwrap();
    let range = DyadicRange::default();
    for &l in spec.lambdas().iter().filter(|&&l| l >= 2f64.powi(range.j_min) && l <= 2f64.powi(range.j_max)) {
        let sum: f64 = range.frequencies().iter().map(|&n| bump_piece(l, n)).sum();
        assert!((sum - 1.0).abs() < 1e-14);
    }
}

#[test]
fn identity_expansion_converges() {
    let dom = DomainSpec::exterior(3).unwrap();
    let f = &family_functions(3).unwrap()[4];
    let base = domain_norm(f, 4.0, dom).unwrap().value;
    for kind in [ProjectorKind::heat(1), ProjectorKind::bump(1)] {
        let mut residuals = Vec::new();
        for w in [0, 2, 4, 6] {
            let range = DyadicRange::new(0, 2).unwrap().widened(w);
            let mut acc = vec![0.0; 0];
            for n in range.frequencies() {
                let p = lp_project(f, n, kind, dom).unwrap();
                let (v, _) = p.samples().unwrap();
                if acc.is_empty() {
                    acc = vec![0.0; v.len()];
                }
                acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
            }
            let probe = lp_project(f, 1.0, kind, dom).unwrap();
            let grid = probe.grid().unwrap().clone();
            let (fv, _) = f.sample_at(grid.nodes());
            let res: Vec<f64> = fv.iter().zip(&acc).map(|(a, b)| a - b).collect();
            let res = RadialFunction::sampled(3, 0, grid, res, None).unwrap();
            residuals.push(domain_norm(&res, 4.0, dom).unwrap().value / base);
        }
        assert!(residuals.windows(2).all(|w| w[1] < w[0]), "{kind:?}: {residuals:?}");
        assert!(*residuals.last().unwrap() < 1e-3, "{kind:?}: {residuals:?}");
    }
}

#[test]
fn square_function_of_a_frequency_localized_bump() {
    let dom = DomainSpec::exterior(3).unwrap();
    let n0 = 8.0;
    let env = bump_profile(6.0, 4.0, 12.0);
    let f = RadialFunction::analytic(3, 0, move |r| env(r) * (n0 * r).cos(), Support::compact(2.0, 10.0)).unwrap();
    let kind = ProjectorKind::bump(1);
    let range = DyadicRange::default();
    let mass = |n: f64| {
        let p = lp_project(&f, n, kind, dom).unwrap();
        domain_norm(&p, 2.0, dom).unwrap().value.powi(2)
    };
    let total: f64 = range.frequencies().iter().map(|&n| mass(n)).sum();
    let near: f64 = [n0 / 2.0, n0, 2.0 * n0].iter().map(|&n| mass(n)).sum();
    assert!(near >= 0.9 * total, "{}", near / total);
    let sq = square_function(&f, 0.0, kind, range, dom).unwrap();
    let s2 = domain_norm(&sq.function, 2.0, dom).unwrap().value.powi(2);
    assert!((s2 - total).abs() < 1e-6 * total);
}

#[test]
fn zero_function_has_zero_square_function() {
    let dom = DomainSpec::exterior(3).unwrap();
    let f = RadialFunction::analytic(3, 0, |_| 0.0, Support::compact(1.0, 5.0)).unwrap();
    let sq = square_function(&f, 1.0, ProjectorKind::heat(1), DyadicRange::default(), dom).unwrap();
    assert!(sq.function.samples().unwrap().0.iter().all(|v| *v == 0.0));
    assert_eq!(sq.tail_fraction, 0.0);
}

#[test]
fn square_function_is_equivalent_to_the_lp_norm() {
    let dom = DomainSpec::exterior(3).unwrap();
    let fam = family_functions(3).unwrap();
    let mut s0 = Vec::new();
    let mut s1 = Vec::new();
    for f in &fam {
        let sq = square_function(f, 0.0, ProjectorKind::heat(1), DyadicRange::default(), dom).unwrap();
        assert!(sq.tail_fraction < 1e-4, "{:?}", sq.warning);
        s0.push(domain_norm(&sq.function, 3.0, dom).unwrap().value / domain_norm(f, 3.0, dom).unwrap().value);
        s1.push(sq_equivalence_ratio(f, 1.0, 2.0, 1, dom).unwrap().value);
    }
    assert!(spread(&s0) < 20.0 && s0.iter().all(|v| *v > 0.0 && v.is_finite()));
    assert!(spread(&s1) < 20.0, "{s1:?}");

    // p = 2 with the bump family: Σψ_N² lies in [1/2, 1], so the ratio is in [1/√2, 1].
    let f = &fam[6];
    let r = sq_equivalence_ratio_with(f, 1.0, 2.0, ProjectorKind::bump(1), DyadicRange::default(), dom, &Default::default())
        .unwrap()
        .value;
    assert!((0.5..=2.0).contains(&r) && r >= 0.5f64.sqrt() - 1e-6 && r <= 1.0 + 1e-6, "{r}");

    let a = sq_equivalence_ratio(f, 0.5, 4.0, 1, dom).unwrap().value;
    let b = sq_equivalence_ratio(&f.scaled(37.5), 0.5, 4.0, 1, dom).unwrap().value;
    assert!((a - b).abs() < 1e-10 * a);
    assert!(sq_equivalence_ratio(f, 2.5, 2.0, 1, dom).is_err());
}

#[test]
fn kernel_difference_has_gaussian_decay() {
    let mut z = Vec::new();
    let mut q = Vec::new();
    for &n in &[0.5, 1.0, 2.0, 4.0] {
        for &rx in &[0.4, 0.9, 1.02, 1.2, 1.6, 2.5, 3.5] {
            for &ry in &[1.02, 1.1, 1.4, 2.0, 3.0] {
                for &theta in &[0.0, 0.6, 1.8] {
                    let x = [rx * f64::cos(theta), rx * f64::sin(theta), 0.0];
                    let y = [ry, 0.0, 0.0];
                    let k = kernel_difference(n, 1, &x, &y, 32).unwrap();
                    let dx = (rx - 1.0).max(0.0);
                    let dy = ry - 1.0;
                    let dist2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
                    z.push(n * n * (dx * dx + dy * dy + dist2));
                    q.push(k.value.abs() / n.powi(3));
                }
            }
        }
    }
    let env = fit_upper(&z, &q, DEFAULT_RATE_RANGE).unwrap();
    assert!(env.c > 0.01 && env.constant.is_finite(), "{env:?}");
}

#[test]
fn kernel_difference_extremes() {
    let far = kernel_difference(4.0, 1, &[6.0, 0.0, 0.0], &[0.0, 6.0, 0.5], 32).unwrap();
    assert!(far.value.abs() <= 1e-12, "{:e}", far.value);
    // At x = y on the boundary layer the exterior kernel is negligible.
    let n: f64 = 2.0;
    let y = [1.0005, 0.0, 0.0];
    let k = kernel_difference(n, 1, &y, &y, 32).unwrap();
    let expect = n.powi(3) * (4.0 * std::f64::consts::PI).powf(-1.5) * (1.0 - 0.125);
    assert!((k.value - expect).abs() < 0.01 * expect, "{} vs {expect}", k.value);
    assert!(kernel_difference(2.0, 1, &y, &[0.5, 0.0, 0.0], 32).is_err());
}

#[test]
fn square_function_difference_is_controlled_by_the_hardy_norm() {
    let fam = family_functions(3).unwrap();
    let ratios: Vec<f64> = fam.iter().map(|f| sq_difference_ratio(f, 1.0, 4.0, 1).unwrap().value).collect();
    assert!(ratios.iter().all(|r| r.is_finite() && *r < 50.0), "{ratios:?}");
    let a = sq_difference_ratio(&fam[3].scaled(0.01), 1.0, 4.0, 1).unwrap().value;
    assert!((a - ratios[3]).abs() < 1e-10 * a);
}

#[test]
fn square_function_difference_vanishes_far_from_the_obstacle() {
    // The slowest projector time is 4/N²; from N = 2 on its Gaussian factor at distance 9 is below 1e-8.
    let f = RadialFunction::analytic(3, 0, bump_profile(12.0, 2.0, 12.0), Support::compact(10.0, 14.0)).unwrap();
    let r = sq_difference_ratio_with(&f, 1.0, 4.0, 1, DyadicRange::new(1, 6).unwrap(), &Default::default()).unwrap();
    assert!(r.value <= 1e-6, "{:e}", r.value);
}

#[test]
fn bernstein_sweep() {
    let dom = DomainSpec::exterior(3).unwrap();
    let f = &family_functions(3).unwrap()[2];
    let mut lq = Vec::new();
    let mut deriv = Vec::new();
    for j in -3..=6 {
        let rep = bernstein_check(f, 2f64.powi(j), 2.0, 6.0, 2.0, dom).unwrap();
        lq.push(rep.lq_ratio.value);
        deriv.push(rep.derivative_ratio.value);
    }
    assert!(lq.iter().all(|v| *v < 20.0), "{lq:?}");
    assert!(spread(&deriv) < 20.0, "{deriv:?}");
    assert!(bernstein_check(f, 1.0, 3.0, 3.0, 1.0, dom).is_err());
    let sup = bernstein_check(f, 4.0, 2.0, f64::INFINITY, 1.0, dom).unwrap();
    assert!(sup.lq_ratio.value.is_finite() && sup.lq_ratio.value > 0.0);
}
