//! Acceptance criteria 1–9, each at its stated tolerance. Prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use extlap::counterexamples::{default_schedule, gradient_counterexample, gradient_limit, hardy_endpoint_run};
use extlap::domain::DomainSpec;
use extlap::family::family_functions;
use extlap::fit::{fit_upper, DEFAULT_RATE_RANGE};
use extlap::heat::{
    heat_apply_radial, image_kernel_3d, pde_oracle_with, sample_geometries, sector_kernel, verify_heat_bounds, CnOptions,
    DEFAULT_ELL_MAX,
};
use extlap::inequalities::*;
use extlap::lp_theory::{kernel_difference, lp_project, sq_equivalence_ratio, DyadicRange, ProjectorKind};
use extlap::radial::{Profile, RadialFunction};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn spread(v: &[f64]) -> f64 {
    let mx = v.iter().copied().fold(0.0, f64::max);
    let mn = v.iter().copied().fold(f64::INFINITY, f64::min);
    mx / mn
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

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for i in 0..10 {
        for j in 0..10 {
            for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
                let r = 1.05 + 2.45 * i as f64 / 9.0;
                let rp = 1.05 + 2.45 * j as f64 / 9.0;
                let s = sector_kernel(3, 0, r, rp, t).unwrap().value;
                let img = image_kernel_3d(r, rp, t).unwrap();
                worst = worst.max((s - img).abs() / img.abs());
            }
        }
    }
    let took = start.elapsed();
    ensure(worst < 1e-6 && took < Duration::from_secs(60), format!("worst rel. error {worst:.2e} in {took:.1?}"))
}

fn heat_ordering_and_shape() -> Outcome {
    let rep = verify_heat_bounds(3, &sample_geometries(200, 11), DEFAULT_ELL_MAX).unwrap();
    let (up, lo) = (rep.upper.expect("upper fit"), rep.lower.expect("lower fit"));
    ensure(
        rep.ordering_violations == 0 && up.c > 0.01 && lo.c > 0.01 && rep.constant_ratio < 1e4,
        format!(
            "{} violations in {} samples, c = ({:.4}, {:.4}), C_upper/C_lower = {:.3e}",
            rep.ordering_violations,
            rep.samples.len(),
            up.c,
            lo.c,
            rep.constant_ratio
        ),
    )
}

fn spectral_vs_crank_nicolson() -> Outcome {
    let dom = DomainSpec::exterior(3).unwrap();
    let fam = family_functions(3).unwrap();
    let mut worst: f64 = 0.0;
    for (k, t) in [(0usize, 0.01), (4, 0.5), (7, 0.5), (9, 2.0), (11, 4.0)] {
        let spectral = heat_apply_radial(&fam[k], t, dom).unwrap();
        let cn = pde_oracle_with(&fam[k], t, dom, &CnOptions::default()).unwrap();
        worst = worst.max(rel_l2(&spectral, |r| cn.eval(r)));
    }
    ensure(worst < 1e-4, format!("worst rel. L² error {worst:.2e} for t ∈ [0.01, 4]"))
}

fn littlewood_paley() -> Outcome {
    let dom = DomainSpec::exterior(3).unwrap();
    let fam = family_functions(3).unwrap();
    let f = &fam[1];
    let mut acc: Option<Vec<f64>> = None;
    for n in DyadicRange::new(-2, 5).unwrap().frequencies() {
        let piece = lp_project(f, n, ProjectorKind::heat(1), dom).unwrap();
        let (v, _) = piece.samples().unwrap();
        match &mut acc {
            None => acc = Some(v.to_vec()),
            Some(a) => a.iter_mut().zip(v).for_each(|(x, y)| *x += y),
        }
    }
    let hi = heat_apply_radial(f, 4f64.powi(-5), dom).unwrap();
    let lo = heat_apply_radial(f, 4.0 * 4f64.powi(2), dom).unwrap();
    let (hv, lv) = (hi.samples().unwrap().0, lo.samples().unwrap().0);
    let telescope = acc.unwrap().iter().zip(hv.iter().zip(lv)).map(|(a, (h, l))| (a - (h - l)).abs()).fold(0.0, f64::max);

    let mut spreads = Vec::new();
    for (p, s) in [(2.0, 1.0), (4.0, 0.5)] {
        let r: Vec<f64> = fam.iter().map(|f| sq_equivalence_ratio(f, s, p, 1, dom).unwrap().value).collect();
        assert!(r.iter().all(|v| v.is_finite() && *v > 0.0));
        spreads.push(spread(&r));
    }

    let (mut z, mut q) = (Vec::new(), Vec::new());
    for n in [0.5, 1.0, 2.0, 4.0] {
        for rx in [0.4, 0.9, 1.02, 1.2, 1.6, 2.5, 3.5] {
            for ry in [1.02, 1.1, 1.4, 2.0, 3.0] {
                for theta in [0.0f64, 0.6, 1.8] {
                    let x = [rx * theta.cos(), rx * theta.sin(), 0.0];
                    let y = [ry, 0.0, 0.0];
                    let k = kernel_difference(n, 1, &x, &y, DEFAULT_ELL_MAX).unwrap();
                    let (dx, dy) = ((rx - 1.0).max(0.0), ry - 1.0);
                    let dist2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
                    z.push(n * n * (dx * dx + dy * dy + dist2));
                    q.push(k.value.abs() / n.powi(3));
                }
            }
        }
    }
    let c = fit_upper(&z, &q, DEFAULT_RATE_RANGE).map_or(0.0, |e| e.c);
    ensure(
        telescope < 1e-8 && spreads.iter().all(|s| *s < 20.0) && c > 0.01,
        format!("telescoping {telescope:.1e}, max/min {spreads:.3?} at (p, s) = (2, 1), (4, 0.5), decay rate c(1) = {c:.4}"),
    )
}

fn norm_equivalence() -> Outcome {
    let fam = family_functions(3).unwrap();
    let exact = fam.iter().map(|f| (norm_equivalence_ratio(f, 1.0, 2.0).unwrap().value - 1.0).abs()).fold(0.0, f64::max);
    let mut worst_band: f64 = 0.0;
    for (p, s) in [(2.0, 0.5), (4.0, 0.5), (1.5, 1.2), (3.0, 0.8), (1.25, 1.5)] {
        assert!(s < f64::min(1.0 + 1.0 / p, 3.0 / p));
        for f in &fam {
            let v = norm_equivalence_ratio(f, s, p).unwrap().value;
            assert!(v.is_finite() && v > 0.0);
            worst_band = worst_band.max(v).max(1.0 / v);
        }
    }
    ensure(exact < 1e-4 && worst_band < 20.0, format!("|ratio − 1| ≤ {exact:.1e} at (2, 1); ratios within factor {worst_band:.3} inside the window"))
}

fn gradient_counterexample_p4() -> Outcome {
    let start = Instant::now();
    let rows = gradient_counterexample(3, 4.0, &default_schedule()).unwrap();
    let took = start.elapsed();
    let limit = gradient_limit(4.0);
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    let a_min = rows.iter().map(|e| e.a).fold(f64::INFINITY, f64::min);
    ensure(
        first.b >= 10.0 * last.b && a_min > 0.5 * limit && last.ratio > 10.0 && took < Duration::from_secs(600),
        format!(
            "B {:.4} → {:.4} (×{:.1}), min A {a_min:.4} vs limit {limit:.4}, final A/B {:.2}, {took:.0?}",
            first.b,
            last.b,
            first.b / last.b,
            last.ratio
        ),
    )
}

fn endpoint_counterexample() -> Outcome {
    let rep = hardy_endpoint_run(3, 1.5, 1.9, 1..=30).unwrap();
    let ctl = hardy_endpoint_run(3, 1.5, 1.2, 1..=30).unwrap();
    let den = rep.denominator.value;
    ensure(
        rep.divergent
            && (0.25..=0.45).contains(&rep.increment_slope)
            && den.is_finite()
            && den > 0.0
            && !rep.denominator.is_divergent()
            && !ctl.divergent
            && ctl.partial_slope.abs() < 0.01,
        format!(
            "slope {:.4} (predicted {:.2}), Dirichlet norm {den:.4e}, control slope {:.1e}",
            rep.increment_slope, rep.predicted_slope, ctl.partial_slope
        ),
    )
}

fn toy_kernels() -> Vec<ToyKernel> {
    let pf = |f: fn(f64) -> f64| -> Profile { Arc::new(f) };
    let sp = Space::annulus(1.2, 3.0).unwrap();
    vec![
        ToyKernel::new(vec![(pf(|r| r), pf(|r| 1.0 / r))], sp).unwrap(),
        ToyKernel::new(vec![(pf(|r| (-(r - 2.0) * (r - 2.0)).exp()), pf(|r| (r - 1.2) * (3.0 - r)))], sp).unwrap(),
        ToyKernel::new(
            vec![(pf(|r| 1.0 + (3.0 * r).sin().abs()), pf(|r| r * r)), (pf(|r| 1.0 / r), pf(|r| (r - 1.0).sqrt())), (pf(|r| (r - 2.0).abs()), pf(|_| 1.0))],
            sp,
        )
        .unwrap(),
    ]
}

fn schur_engine() -> Outcome {
    let (p, s, d) = (2.0, 1.0, 3);
    let w = region_weight(Region::IIa, p, s, d).unwrap();
    let k = far_region_kernel(d, s);
    let inside = schur_sweep(&k, &w, p, d, &SchurOptions::default()).unwrap();
    let (a, b) = (&inside.levels[0], &inside.levels[1]);
    let change = f64::max((a.c0 - b.c0).abs() / b.c0, (a.c1 - b.c1).abs() / b.c1);
    let below = schur_sweep(&k, &w.with_alpha(w.window.0 - 0.5), p, d, &SchurOptions { levels: 3, ..Default::default() }).unwrap();
    let above = schur_sweep(&k, &w.with_alpha(w.window.1 + 1.0), p, d, &SchurOptions { levels: 3, extend_range: true, ..Default::default() })
        .unwrap();
    let mut toys_ok = true;
    for (i, toy) in toy_kernels().iter().enumerate() {
        for tp in [1.5, 2.0, 4.0] {
            let bound = schur_bound(&toy.kernel(), &WeightSpec::unit(), tp, d).unwrap().bound;
            let lower = toy.random_lower_bound(d, tp, 100, 7 + i as u64).unwrap();
            toys_ok &= bound >= lower && lower > 0.0;
        }
    }
    ensure(
        change < 0.02 && below.grows_monotonically(0.0) && above.grows_monotonically(0.0) && toys_ok,
        format!(
            "admissible α = {}: change {change:.2e}; α = {} and {} grow: {}/{}; toy bounds dominate: {toys_ok}",
            w.alpha,
            w.window.0 - 0.5,
            w.window.1 + 1.0,
            below.grows_monotonically(0.0),
            above.grows_monotonically(0.0)
        ),
    )
}

fn hardy_suites() -> Outcome {
    let fam = family_functions(3).unwrap();
    let mut worst: f64 = 0.0;
    for (p, s) in [(2.0, 0.9), (2.0, 1.4), (4.0, 0.5), (1.5, 1.2), (3.0, 0.6)] {
        assert!(s < f64::min(1.0 + 1.0 / p, 3.0 / p));
        for op in [HardyOperator::Euclidean, HardyOperator::Dirichlet] {
            for f in &fam {
                let r = hardy_ratio(f, s, p, op).unwrap();
                if r.is_divergent() || !(r.value.is_finite() && r.value > 0.0) {
                    return Err(format!("{op:?} ratio at (p, s) = ({p}, {s}) is {}", r.value));
                }
                worst = worst.max(r.value);
            }
        }
    }
    let mut mismatches = 0;
    let mut cases = 0;
    for p in [1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0] {
        let edge = 1.0 + 1.0 / p;
        let mut svals: Vec<f64> = (0..=300).map(|j| j as f64 / 100.0).collect();
        svals.extend([edge, edge - 1e-9, edge + 1e-9]);
        for s in svals {
            for region in [Region::Ic, Region::Id, Region::IId] {
                cases += 1;
                if region_weight(region, p, s, 3).is_err() != (s >= edge) {
                    mismatches += 1;
                }
            }
        }
    }
    ensure(mismatches == 0, format!("largest family ratio {worst:.4}; window arithmetic {mismatches} mismatches in {cases} cases"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sector kernel vs image oracle", oracle_equivalence),
        ("heat ordering chain and two-sided Gaussian shape", heat_ordering_and_shape),
        ("spectral vs Crank–Nicolson heat evolution", spectral_vs_crank_nicolson),
        ("Littlewood–Paley telescoping, square-function band, kernel decay", littlewood_paley),
        ("fractional Sobolev norm equivalence", norm_equivalence),
        ("gradient counterexample at p = 4", gradient_counterexample_p4),
        ("endpoint counterexample at p = 3/2, s = 1.9", endpoint_counterexample),
        ("Schur engine", schur_engine),
        ("Hardy suites and weight windows", hardy_suites),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg} [{took:.1}s]", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} [{took:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
