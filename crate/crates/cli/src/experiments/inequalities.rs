//! Hardy, norm-equivalence and Schur-test suites.

use std::sync::Arc;

use extlap::family::family_functions;
use extlap::inequalities::{
    far_region_kernel, hardy_ratio, norm_equivalence_ratio, region_weight, schur_bound, schur_sweep, HardyOperator, Region,
    SchurOptions, Space, ToyKernel, WeightSpec,
};
use extlap::radial::Profile;

use super::*;

const SMOOTHNESS: Interval = Interval::closed(0.0, 4.0);

pub(super) fn hardy_params() -> Vec<Param> {
    vec![
        dim("3", 6),
        param(
            "cases",
            Kind::Pairs { first: EXPONENT, second: SMOOTHNESS },
            "2:0.9,2:1.4,4:0.5,1.5:1.2",
            "p:s pairs; each must satisfy 0 < s < min(1 + 1/p, d/p)",
        ),
        param("window_p", Kind::Floats(EXPONENT), "1.25,1.5,2,3,4,8", "exponents of the weight-window arithmetic check"),
        param("ratio_max", Kind::Float(POSITIVE), "1e3", "largest acceptable family ratio"),
    ]
}

pub(super) fn hardy_check(p: &Params) -> Vec<Diagnostic> {
    let d = p.uint("d");
    p.pairs("cases")
        .iter()
        .filter(|&&(ep, s)| !(s > 0.0 && in_equivalence_window(d, ep, s)))
        .map(|&(ep, s)| p.diag("cases", format!("(p, s) = ({ep}, {s}) lies outside 0 < s < min(1 + 1/p, d/p)")))
        .collect()
}

pub(super) fn hardy_sweep(cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
    let p = &cfg.params;
    let d = p.uint("d");
    let ratio_max = p.float("ratio_max");
    run.stage("family-ratios", &["hardy_ratio"], &[("ratio_max", ratio_max)]);
    let fam = family_functions(d)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &(ep, s) in p.pairs("cases") {
        for op in [HardyOperator::Euclidean, HardyOperator::Dirichlet] {
            let reports = fam.iter().map(|f| hardy_ratio(f, s, ep, op)).collect::<extlap::Result<Vec<_>>>()?;
            let vals: Vec<f64> = reports.iter().map(|r| r.value).collect();
            for (i, r) in reports.iter().enumerate() {
                rows.push(vec![format!("{op:?}").to_lowercase(), num(ep), num(s), i.to_string(), num(r.value), num(r.error)]);
            }
            let mx = vals.iter().copied().fold(0.0, f64::max);
            let ok = vals.iter().all(|v| v.is_finite() && *v > 0.0) && reports.iter().all(|r| !r.is_divergent()) && mx < ratio_max;
            run.check(&format!("{op:?} Hardy ratios finite at p = {ep}, s = {s}"), ok, format!("max ratio {mx:.6}"));
            summary.push(serde_json::json!({ "operator": op, "p": ep, "s": s, "max": mx, "reports": reports }));
        }
    }
    run.table("hardy_ratios", csv("operator,p,s,index,ratio,error", rows));
    run.result("hardy", summary);

    run.stage("window-arithmetic", &["region_weight"], &[]);
    let mut mismatches = Vec::new();
    let mut tested = 0usize;
    for &ep in p.floats("window_p") {
        let edge = 1.0 + 1.0 / ep;
        let mut svals: Vec<f64> = (0..=288).map(|j| j as f64 / 96.0).collect();
        svals.extend([edge, edge - 1e-9, edge + 1e-9, edge - 1e-6, edge + 1e-6]);
        for s in svals {
            for region in [Region::Ic, Region::Id, Region::IId] {
                tested += 1;
                let empty = region_weight(region, ep, s, d).is_err();
                if empty != (s >= edge) {
                    mismatches.push(format!("{region:?} at p = {ep}, s = {s}"));
                }
            }
        }
    }
    run.result("window_cases", tested);
    run.result("window_mismatches", &mismatches);
    run.check(
        "distance-ratio weight window is empty exactly when s ≥ 1 + 1/p",
        mismatches.is_empty(),
        format!("{} of {tested} cases disagree", mismatches.len()),
    );
    Ok(())
}

pub(super) fn equivalence_params() -> Vec<Param> {
    vec![
        dim("3", 6),
        param("p", Kind::Float(EXPONENT), "2", "integrability exponent"),
        param("s", Kind::Float(SMOOTHNESS), "1", "smoothness"),
        param("band", Kind::Float(Interval::left_open(1.0, f64::INFINITY)), "20", "ratios must lie in (1/band, band)"),
        param("equality_tol", Kind::Float(FRACTION), "1e-4", "relative tolerance of the exact case p = 2, s = 1"),
    ]
}

pub(super) fn equivalence_check(p: &Params) -> Vec<Diagnostic> {
    let (d, ep, s) = (p.uint("d"), p.float("p"), p.float("s"));
    if in_equivalence_window(d, ep, s) {
        Vec::new()
    } else {
        vec![p.diag("s", format!("s = {s} is outside the window s < min(1 + 1/p, d/p) = {}", (1.0 + 1.0 / ep).min(d as f64 / ep)))]
    }
}

pub(super) fn equivalence_sweep(cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
    let p = &cfg.params;
    let (d, ep, s) = (p.uint("d"), p.float("p"), p.float("s"));
    let (band, tol) = (p.float("band"), p.float("equality_tol"));
    let exact = ep == 2.0 && s == 1.0;
    run.stage("family-ratios", &["norm_equivalence_ratio"], &[("band", band), ("equality_tol", tol)]);
    let fam = family_functions(d)?;
    let reports = fam.iter().map(|f| norm_equivalence_ratio(f, s, ep)).collect::<extlap::Result<Vec<_>>>()?;
    let vals: Vec<f64> = reports.iter().map(|r| r.value).collect();
    run.table(
        "equivalence_ratios",
        csv("index,ratio,error", reports.iter().enumerate().map(|(i, r)| vec![i.to_string(), num(r.value), num(r.error)])),
    );
    let (mx, mn) = (vals.iter().copied().fold(0.0, f64::max), vals.iter().copied().fold(f64::INFINITY, f64::min));
    let finite = vals.iter().all(|v| v.is_finite() && *v > 0.0);
    if exact {
        let worst = vals.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        run.check("norms agree exactly at p = 2, s = 1", finite && worst < tol, format!("worst |ratio − 1| = {worst:e}"));
    }
    run.check("family ratios within the band", finite && mx < band && 1.0 / mn < band, format!("ratios in [{mn:.6}, {mx:.6}]"));
    run.result("min", mn);
    run.result("max", mx);
    run.result("reports", reports);
    Ok(())
}

pub(super) fn schur_params() -> Vec<Param> {
    let opt = |key, kind, help| Param { key, kind, default: None, help };
    vec![
        dim("3", 6),
        param("p", Kind::Float(EXPONENT), "2", "integrability exponent"),
        param("s", Kind::Float(Interval::open(0.0, 6.0)), "1", "smoothness of the far-region kernel"),
        opt("alpha", Kind::Float(Interval::closed(-50.0, 50.0)), "admissible exponent (default: window midpoint)"),
        opt("alpha_low", Kind::Float(Interval::closed(-50.0, 50.0)), "exponent below the window (default: lower end − 0.5)"),
        opt("alpha_high", Kind::Float(Interval::closed(-50.0, 50.0)), "exponent above the window (default: upper end + 1)"),
        param("levels", Kind::Int { min: 2, max: 5 }, "2", "grid refinements of the admissible sweep"),
        param("stability_tol", Kind::Float(FRACTION), "0.02", "relative change allowed between the last two levels"),
        param("growth_min", Kind::Float(FRACTION), "0.1", "relative growth per level counted as growth"),
        param("toy_samples", Kind::Int { min: 4, max: 10_000 }, "100", "random test functions per toy kernel"),
        param("toy_p", Kind::Floats(EXPONENT), "1.5,2,4", "exponents for the toy kernels"),
    ]
}

fn far_window(p: &Params) -> Result<WeightSpec, Diagnostic> {
    region_weight(Region::IIa, p.float("p"), p.float("s"), p.uint("d")).map_err(|e| p.diag("s", e.to_string()))
}

pub(super) fn schur_check(p: &Params) -> Vec<Diagnostic> {
    let w = match far_window(p) {
        Ok(w) => w,
        Err(d) => return vec![d],
    };
    let (lo, hi) = w.window;
    let mut diags = Vec::new();
    if p.float("s") >= p.int("d") as f64 {
        diags.push(p.diag("s", "the far-region kernel needs s < d"));
    }
    if let Some(a) = p.opt_float("alpha") {
        if !w.with_alpha(a).admissible() {
            diags.push(p.diag("alpha", format!("{a} is outside the admissible window ({lo}, {hi})")));
        }
    }
    if let Some(a) = p.opt_float("alpha_low") {
        if a >= lo {
            diags.push(p.diag("alpha_low", format!("{a} must lie below the window ({lo}, {hi})")));
        }
    }
    if let Some(a) = p.opt_float("alpha_high") {
        if a <= hi {
            diags.push(p.diag("alpha_high", format!("{a} must lie above the window ({lo}, {hi})")));
        }
    }
    diags
}

fn profile(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Profile {
    Arc::new(f)
}

/// Kernels on the annulus 1.2 < |x| < 3 with explicit low-rank structure.
fn toy_kernels() -> extlap::Result<Vec<ToyKernel>> {
    let sp = Space::annulus(1.2, 3.0)?;
    Ok(vec![
        ToyKernel::new(vec![(profile(|r| r), profile(|r| 1.0 / r))], sp)?,
        ToyKernel::new(vec![(profile(|r| (-(r - 2.0) * (r - 2.0)).exp()), profile(|r| (r - 1.2) * (3.0 - r)))], sp)?,
        ToyKernel::new(
            vec![
                (profile(|r| 1.0 + (3.0 * r).sin().abs()), profile(|r| r * r)),
                (profile(|r| 1.0 / r), profile(|r| (r - 1.0).sqrt())),
                (profile(|r| (r - 2.0).abs()), profile(|_| 1.0)),
            ],
            sp,
        )?,
    ])
}

pub(super) fn schur(cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
    let p = &cfg.params;
    let (d, ep, s) = (p.uint("d"), p.float("p"), p.float("s"));
    let w = region_weight(Region::IIa, ep, s, d)?;
    let w = p.opt_float("alpha").map_or(w, |a| w.with_alpha(a));
    let kernel = far_region_kernel(d, s);
    let levels = p.uint("levels");
    let (stab, growth) = (p.float("stability_tol"), p.float("growth_min"));

    run.stage("admissible", &["schur_sweep", "far_region_kernel"], &[("stability_tol", stab)]);
    let opts = SchurOptions { levels, tol: stab, ..Default::default() };
    let inside = schur_sweep(&kernel, &w, ep, d, &opts)?;
    let (a, b) = (&inside.levels[inside.levels.len() - 2], &inside.levels[inside.levels.len() - 1]);
    let (dc0, dc1) = ((b.c0 - a.c0).abs() / b.c0, (b.c1 - a.c1).abs() / b.c1);
    run.check(
        "sups stabilize under refinement for admissible α",
        inside.converged && dc0 < stab && dc1 < stab,
        format!("α = {}: relative changes C0 {dc0:e}, C1 {dc1:e}", w.alpha),
    );
    let level_rows = |rep: &extlap::inequalities::SchurReport, tag: &str| -> Vec<Vec<String>> {
        rep.levels
            .iter()
            .map(|l| vec![tag.to_string(), num(rep.weight.alpha), l.level.to_string(), l.points.to_string(), num(l.c0), num(l.c1), l.tail_divergent.to_string()])
            .collect()
    };
    let mut rows = level_rows(&inside, "admissible");
    let mut reports = vec![inside];

    run.stage("outside-window", &["schur_sweep"], &[("growth_min", growth)]);
    let (lo, hi) = w.window;
    let low = p.opt_float("alpha_low").or(lo.is_finite().then_some(lo - 0.5));
    let high = p.opt_float("alpha_high").or(hi.is_finite().then_some(hi + 1.0));
    for (tag, alpha, extend) in [("below", low, false), ("above", high, true)] {
        let Some(alpha) = alpha else { continue };
        let opts = SchurOptions { levels: 3, extend_range: extend, tol: stab, ..Default::default() };
        let rep = schur_sweep(&kernel, &w.with_alpha(alpha), ep, d, &opts)?;
        run.check(
            &format!("a sup grows under refinement for α {tag} the window"),
            rep.grows_monotonically(growth) && !rep.converged,
            format!("α = {alpha}: C0 {:?}, C1 {:?}", rep.levels.iter().map(|l| l.c0).collect::<Vec<_>>(), rep.levels.iter().map(|l| l.c1).collect::<Vec<_>>()),
        );
        rows.extend(level_rows(&rep, tag));
        reports.push(rep);
    }
    run.table("schur_levels", csv("sweep,alpha,level,points,c0,c1,tail_divergent", rows));
    run.result("far_region", reports);

    let samples = p.int("toy_samples") as usize;
    run.stage("toy-kernels", &["schur_bound", "random_lower_bound", "rank_one_norm"], &[]);
    let mut rows = Vec::new();
    for (i, toy) in toy_kernels()?.iter().enumerate() {
        for &tp in p.floats("toy_p") {
            let rep = schur_bound(&toy.kernel(), &WeightSpec::unit(), tp, d)?;
            let lower = toy.random_lower_bound(d, tp, samples, cfg.seed().wrapping_add(i as u64))?;
            let exact = if toy.terms.len() == 1 { Some(toy.rank_one_norm(d, tp)?) } else { None };
            let sandwiched = exact.is_none_or(|e| lower <= e * (1.0 + 1e-9) && e <= rep.bound * (1.0 + 1e-6));
            run.check(
                &format!("Schur bound dominates the sampled norm for toy kernel {i} at p = {tp}"),
                rep.bound >= lower && lower > 0.0 && sandwiched,
                format!("bound {:.6}, sampled {lower:.6}, exact {exact:?}", rep.bound),
            );
            rows.push(vec![i.to_string(), num(tp), num(rep.bound), num(lower), exact.map_or(String::new(), num)]);
        }
    }
    run.table("toy_kernels", csv("toy,p,schur_bound,sampled_lower,exact", rows));
    Ok(())
}
