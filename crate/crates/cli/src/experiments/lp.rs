//! Littlewood–Paley suite.

use extlap::domain::DomainSpec;
use extlap::family::family_functions;
use extlap::fit::{fit_upper, DEFAULT_RATE_RANGE};
use extlap::heat::heat_apply_radial;
use extlap::lp_theory::{kernel_difference, lp_project, sq_equivalence_ratio, DyadicRange, ProjectorKind};

use super::*;

pub(super) fn params() -> Vec<Param> {
    vec![
        dim("3", 8),
        param(
            "cases",
            Kind::Pairs { first: EXPONENT, second: Interval::closed(0.0, 2.0) },
            "2:1,4:0.5",
            "p:s pairs for the square-function ratio",
        ),
        param("telescope_tol", Kind::Float(FRACTION), "1e-8", "absolute telescoping defect"),
        param("spread_max", Kind::Float(POSITIVE), "20", "largest max/min ratio over the family"),
        param("c_min", Kind::Float(POSITIVE), "0.01", "smallest acceptable Gaussian rate of the kernel difference"),
        param("ell_max", Kind::Int { min: 4, max: 128 }, "32", "angular truncation of the exterior kernel"),
    ]
}

pub(super) fn check(p: &Params) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    only_d3(p, &mut diags);
    // Heat projectors of order k = 1 need 2k > s.
    for &(_, s) in p.pairs("cases") {
        if s >= 2.0 {
            diags.push(p.diag("cases", format!("s = {s} needs a projector order k with 2k > s; only k = 1 is used")));
        }
    }
    diags
}

pub(super) fn lp_verify(cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
    let p = &cfg.params;
    let dom = DomainSpec::exterior(3)?;
    let fam = family_functions(3)?;
    let tol = p.float("telescope_tol");

    run.stage("telescoping", &["lp_project", "heat_apply_radial"], &[("telescope_tol", tol)]);
    let f = &fam[1];
    let range = DyadicRange::new(-2, 5)?;
    let mut acc: Option<Vec<f64>> = None;
    for n in range.frequencies() {
        let piece = lp_project(f, n, ProjectorKind::heat(1), dom)?;
        let (v, _) = piece.samples().expect("projections are sampled");
        match &mut acc {
            None => acc = Some(v.to_vec()),
            Some(a) => a.iter_mut().zip(v).for_each(|(x, y)| *x += y),
        }
    }
    let hi = heat_apply_radial(f, 4f64.powi(-5), dom)?;
    let lo = heat_apply_radial(f, 4.0 * 4f64.powi(2), dom)?;
    let (hv, _) = hi.samples().expect("sampled");
    let (lv, _) = lo.samples().expect("sampled");
    let defect = acc
        .unwrap_or_default()
        .iter()
        .zip(hv.iter().zip(lv))
        .map(|(a, (h, l))| (a - (h - l)).abs())
        .fold(0.0, f64::max);
    run.result("telescoping_defect", defect);
    run.check("heat projections telescope", defect < tol, format!("max defect {defect:e}"));

    let spread_max = p.float("spread_max");
    run.stage("square-function", &["sq_equivalence_ratio"], &[("spread_max", spread_max)]);
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &(ep, s) in p.pairs("cases") {
        let reports = fam.iter().map(|f| sq_equivalence_ratio(f, s, ep, 1, dom)).collect::<extlap::Result<Vec<_>>>()?;
        let vals: Vec<f64> = reports.iter().map(|r| r.value).collect();
        for (i, r) in reports.iter().enumerate() {
            rows.push(vec![num(ep), num(s), i.to_string(), num(r.value), num(r.error)]);
        }
        let sp = spread(&vals);
        let ok = vals.iter().all(|v| v.is_finite() && *v > 0.0) && sp < spread_max;
        run.check(&format!("square-function ratio band at p = {ep}, s = {s}"), ok, format!("max/min = {sp:.4}"));
        summary.push(serde_json::json!({ "p": ep, "s": s, "spread": sp, "reports": reports }));
    }
    run.table("square_function_ratios", csv("p,s,index,ratio,error", rows));
    run.result("square_function", summary);

    let c_min = p.float("c_min");
    run.stage("kernel-difference", &["kernel_difference", "fit_upper"], &[("c_min", c_min)]);
    let ell_max = p.uint("ell_max");
    let (mut z, mut q) = (Vec::new(), Vec::new());
    for n in [0.5, 1.0, 2.0, 4.0] {
        for rx in [0.4, 0.9, 1.02, 1.2, 1.6, 2.5, 3.5] {
            for ry in [1.02, 1.1, 1.4, 2.0, 3.0] {
                for theta in [0.0f64, 0.6, 1.8] {
                    let x = [rx * theta.cos(), rx * theta.sin(), 0.0];
                    let y = [ry, 0.0, 0.0];
                    let k = kernel_difference(n, 1, &x, &y, ell_max)?;
                    let dx = (rx - 1.0).max(0.0);
                    let dy = ry - 1.0;
                    let dist2: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum();
                    z.push(n * n * (dx * dx + dy * dy + dist2));
                    q.push(k.value.abs() / n.powi(3));
                }
            }
        }
    }
    let env = fit_upper(&z, &q, DEFAULT_RATE_RANGE);
    run.plot("kernel_difference_decay", dat("z |K|/N^3", z.iter().zip(&q).map(|(a, b)| vec![*a, *b])));
    run.result("kernel_difference_envelope", env);
    run.check(
        "kernel difference has Gaussian decay with rate above c_min",
        env.is_some_and(|e| e.c > c_min && e.constant.is_finite()),
        format!("{env:?}"),
    );
    Ok(())
}
