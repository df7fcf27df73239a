//! The two counterexample experiments.

use extlap::counterexamples::{gradient_counterexample, gradient_limit, hardy_endpoint_run, schedule_csv, ScheduleParams};

use super::*;

pub(super) fn endpoint_params() -> Vec<Param> {
    vec![
        dim("3", 8),
        param("p", Kind::Float(EXPONENT), "1.5", "integrability exponent"),
        param("s", Kind::Float(Interval::closed(0.0, 4.0)), "1.9", "smoothness; needs 1 + 1/p ≤ s < d/p"),
        param("control_s", Kind::Float(Interval::closed(0.0, 4.0)), "1.2", "control smoothness; needs s < 1 + 1/p"),
        param("k_min", Kind::Int { min: 1, max: 40 }, "1", "coarsest truncation δ = 2^-k_min"),
        param("k_max", Kind::Int { min: 1, max: 40 }, "30", "finest truncation δ = 2^-k_max"),
        param("slope_tol", Kind::Float(FRACTION), "0.1", "allowed distance of the fitted slope from the predicted one"),
        param("control_slope_max", Kind::Float(FRACTION), "0.01", "largest log-log slope of converging partial integrals"),
    ]
}

pub(super) fn endpoint_check(p: &Params) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    only_d3(p, &mut diags);
    let (d, ep) = (p.int("d") as f64, p.float("p"));
    let edge = 1.0 + 1.0 / ep;
    let s = p.float("s");
    if !(s >= edge && s < d / ep) {
        diags.push(p.diag("s", format!("s = {s} must satisfy 1 + 1/p = {edge} ≤ s < d/p = {}", d / ep)));
    }
    if p.float("control_s") >= edge {
        diags.push(p.diag("control_s", format!("must lie below 1 + 1/p = {edge}")));
    }
    if p.int("k_max") < p.int("k_min") + 7 {
        diags.push(p.diag("k_max", "the slope fit needs k_max ≥ k_min + 7"));
    }
    diags
}

pub(super) fn endpoint(cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
    let p = &cfg.params;
    let (ep, s, cs) = (p.float("p"), p.float("s"), p.float("control_s"));
    let ks = p.uint("k_min")..=p.uint("k_max");
    let (slope_tol, control_max) = (p.float("slope_tol"), p.float("control_slope_max"));

    run.stage("endpoint", &["heat_smoothed_bump", "hardy_endpoint_run"], &[("slope_tol", slope_tol)]);
    let rep = hardy_endpoint_run(3, ep, s, ks.clone())?;
    let near = (rep.increment_slope - rep.predicted_slope).abs() <= slope_tol;
    run.check(
        "weighted partial integrals diverge at the predicted rate",
        rep.divergent && near,
        format!("fitted slope {:.6}, predicted {:.6}", rep.increment_slope, rep.predicted_slope),
    );
    let den_ok = rep.denominator.value.is_finite() && rep.denominator.value > 0.0 && !rep.denominator.is_divergent();
    run.check("Dirichlet-side norm is finite", den_ok, format!("‖(−Δ_Ω)^(s/2) g‖_p = {:e}", rep.denominator.value));

    run.stage("control", &["hardy_endpoint_run"], &[("control_slope_max", control_max)]);
    let ctl = hardy_endpoint_run(3, ep, cs, ks)?;
    run.check(
        "control run converges",
        !ctl.divergent && ctl.partial_slope.abs() < control_max,
        format!("partial-integral slope {:e}", ctl.partial_slope),
    );
    let rows = rep.partials.iter().zip(&ctl.partials).map(|(a, b)| vec![num(a.0), num(a.1), num(b.1)]);
    run.table("partials", csv("delta,partial,control_partial", rows));
    run.plot(
        "partials",
        dat("log2(1/delta) log(partial) log(control_partial)", rep.partials.iter().zip(&ctl.partials).map(|(a, b)| vec![-a.0.log2(), a.1.ln(), b.1.ln()])),
    );
    run.result("endpoint", rep);
    run.result("control", ctl);
    Ok(())
}

pub(super) fn gradient_params() -> Vec<Param> {
    vec![
        dim("3", 8),
        param("p", Kind::Float(Interval::open(3.0, 64.0)), "4", "integrability exponent; needs p > d"),
        param("n_min", Kind::Int { min: 3, max: 40 }, "3", "first schedule index: λ = ε = 2^-n"),
        param("n_max", Kind::Int { min: 3, max: 40 }, "22", "last schedule index"),
        param("r_shift", Kind::Int { min: 2, max: 12 }, "4", "outer cutoff radius R = 2^(n + r_shift)"),
        param("decay_min", Kind::Float(Interval::left_open(1.0, f64::INFINITY)), "10", "required decrease factor of B across the schedule"),
        param("ratio_min", Kind::Float(POSITIVE), "10", "required final A/B"),
        param("a_fraction", Kind::Float(FRACTION), "0.5", "A must stay above this fraction of its λ → 0 limit"),
    ]
}

pub(super) fn gradient_check(p: &Params) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    only_d3(p, &mut diags);
    if p.int("n_max") <= p.int("n_min") {
        diags.push(p.diag("n_max", "must exceed n_min"));
    }
    diags
}

pub(super) fn gradient(cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
    let p = &cfg.params;
    let ep = p.float("p");
    let shift = p.int("r_shift") as i32;
    let schedule: Vec<ScheduleParams> = (p.uint("n_min")..=p.uint("n_max"))
        .map(|n| {
            let h = 2f64.powi(-(n as i32));
            ScheduleParams { n, lambda: h, eps: h, r_outer: 2f64.powi(n as i32 + shift) }
        })
        .collect();
    let (decay_min, ratio_min, frac) = (p.float("decay_min"), p.float("ratio_min"), p.float("a_fraction"));
    run.stage(
        "schedule",
        &["gradient_counterexample", "mode_norms", "gradient_limit"],
        &[("decay_min", decay_min), ("ratio_min", ratio_min), ("a_fraction", frac)],
    );
    let rows = gradient_counterexample(3, ep, &schedule)?;
    let limit = gradient_limit(ep);
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    run.check(
        "B decreases by decay_min across the schedule",
        first.b >= decay_min * last.b,
        format!("B from {:e} to {:e} (factor {:.4})", first.b, last.b, first.b / last.b),
    );
    let a_min = rows.iter().map(|e| e.a).fold(f64::INFINITY, f64::min);
    run.check("A stays above a_fraction of its limit", a_min > frac * limit, format!("min A {a_min:.6}, limit {limit:.6}"));
    run.check("final A/B exceeds ratio_min", last.ratio > ratio_min, format!("final A/B {:.6}", last.ratio));
    run.check(
        "gradient quadrature is resolved",
        rows.iter().all(|e| e.a_stable() && e.mode_error < 1e-10),
        format!("largest mode error {:e}", rows.iter().map(|e| e.mode_error).fold(0.0, f64::max)),
    );
    run.table("schedule", schedule_csv(&rows));
    run.plot("schedule", dat("n A B A/B", rows.iter().map(|e| vec![e.n as f64, e.a, e.b, e.ratio])));
    run.result("gradient_limit", limit);
    run.result("schedule", rows);
    Ok(())
}
