//! Heat-kernel and Riesz-potential suites.

use extlap::domain::DomainSpec;
use extlap::family::family_functions;
use extlap::heat::{
    heat_apply_radial, image_kernel_3d, pde_oracle_with, sample_geometries, sector_kernel, verify_heat_bounds, CnOptions,
};
use extlap::inequalities::{riesz_constant, riesz_kernel, riesz_kernel_whole, riesz_shape, TimeQuadrature};
use extlap::radial::RadialFunction;

use super::*;

pub(super) fn heat_params() -> Vec<Param> {
    vec![
        dim("3", 6),
        param("samples", Kind::Int { min: 8, max: 5000 }, "200", "sampled (x, y, t) geometries for the bound fit"),
        param("ell_max", Kind::Int { min: 4, max: 128 }, "32", "angular truncation of the exterior kernel"),
        param(
            "cn_cases",
            Kind::Pairs { first: Interval::closed(0.0, 11.0), second: Interval::closed(0.01, 4.0) },
            "0:0.01,4:0.5,7:0.5,11:4",
            "family index:time pairs for the Crank–Nicolson comparison",
        ),
        param("oracle_tol", Kind::Float(FRACTION), "1e-6", "relative tolerance against the image oracle"),
        param("cn_tol", Kind::Float(FRACTION), "1e-4", "relative L² tolerance against Crank–Nicolson"),
        param("c_min", Kind::Float(POSITIVE), "0.01", "smallest acceptable Gaussian rate"),
        param("ratio_max", Kind::Float(POSITIVE), "1e4", "largest acceptable upper/lower constant ratio"),
    ]
}

pub(super) fn heat_check(p: &Params) -> Vec<Diagnostic> {
    p.pairs("cn_cases")
        .iter()
        .filter(|(k, _)| k.fract() != 0.0)
        .map(|(k, _)| p.diag("cn_cases", format!("family index {k} is not an integer")))
        .collect()
}

/// Relative L²(r^{d−1}dr) distance on the nodes of a sampled function.
fn rel_l2(reference: &RadialFunction, other: impl Fn(f64) -> f64) -> f64 {
    let grid = reference.grid().expect("heat evolution is sampled").clone();
    let (vals, _) = reference.samples().expect("heat evolution is sampled");
    let dm1 = reference.d() as i32 - 1;
    let (mut num, mut den) = (0.0, 0.0);
    for ((r, w), v) in grid.nodes().iter().zip(grid.weights()).zip(vals) {
        let m = w * r.powi(dm1);
        num += m * (other(*r) - v).powi(2);
        den += m * v * v;
    }
    (num / den).sqrt()
}

pub(super) fn heat_verify(cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
    let p = &cfg.params;
    let d = p.uint("d");
    let oracle_tol = p.float("oracle_tol");

    if d == 3 {
        run.stage("image-oracle", &["sector_kernel", "image_kernel_3d"], &[("oracle_tol", oracle_tol)]);
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for i in 0..10 {
            for j in 0..10 {
                for t in [0.25, 0.5, 1.0, 2.0, 4.0] {
                    let r = 1.05 + 2.45 * i as f64 / 9.0;
                    let rp = 1.05 + 2.45 * j as f64 / 9.0;
                    let s = sector_kernel(3, 0, r, rp, t)?.value;
                    let img = image_kernel_3d(r, rp, t)?;
                    let e = (s - img).abs() / img.abs();
                    worst = worst.max(e);
                    rows.push(vec![num(r), num(rp), num(t), num(s), num(img), num(e)]);
                }
            }
        }
        run.table("image_oracle", csv("r,rprime,t,sector,image,rel_err", rows));
        run.result("image_oracle_worst_rel_err", worst);
        run.check("radial sector kernel matches the image oracle", worst < oracle_tol, format!("worst relative error {worst:e} (tolerance {oracle_tol:e})"));
    } else {
        run.result("image_oracle_worst_rel_err", Json::Null);
    }

    let (c_min, ratio_max) = (p.float("c_min"), p.float("ratio_max"));
    run.stage("bounds", &["sample_geometries", "verify_heat_bounds", "fit_upper", "fit_lower"], &[("c_min", c_min), ("ratio_max", ratio_max)]);
    let geoms = sample_geometries(p.int("samples") as usize, cfg.seed());
    let rep = verify_heat_bounds(d, &geoms, p.uint("ell_max"))?;
    let rows = rep.samples.iter().map(|s| {
        vec![num(s.r), num(s.rprime), num(s.cos_theta), num(s.t), num(s.exterior), num(s.err), num(s.halfspace), num(s.gauss), num(s.z), num(s.ratio)]
    });
    run.table("heat_samples", csv("r,rprime,cos_theta,t,exterior,err,halfspace,gauss,z,ratio", rows));
    run.plot("envelope", dat("z ratio", rep.samples.iter().map(|s| vec![s.z, s.ratio])));
    run.check(
        "ordering 0 ≤ half-space ≤ exterior ≤ Gaussian",
        rep.ordering_violations == 0,
        format!("{} violations in {} samples", rep.ordering_violations, rep.samples.len()),
    );
    let rates = match (rep.upper, rep.lower) {
        (Some(u), Some(l)) => Some((u.c, l.c)),
        _ => None,
    };
    run.check(
        "fitted Gaussian rates exceed c_min",
        rates.is_some_and(|(u, l)| u > c_min && l > c_min),
        format!("rates (upper, lower) = {rates:?}"),
    );
    run.check(
        "upper/lower constant ratio below ratio_max",
        rep.constant_ratio < ratio_max,
        format!("C_upper/C_lower = {:e}", rep.constant_ratio),
    );
    run.result("bounds", serde_json::json!({
        "upper": rep.upper,
        "lower": rep.lower,
        "constant_ratio": rep.constant_ratio,
        "ordering_violations": rep.ordering_violations,
        "samples": rep.samples.len(),
    }));

    let cn_tol = p.float("cn_tol");
    run.stage("crank-nicolson", &["heat_apply_radial", "pde_oracle_with"], &[("cn_tol", cn_tol)]);
    let dom = DomainSpec::exterior(d)?;
    let fam = family_functions(d)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &(k, t) in p.pairs("cn_cases") {
        let f = &fam[k as usize];
        let spectral = heat_apply_radial(f, t, dom)?;
        let cn = pde_oracle_with(f, t, dom, &CnOptions::default())?;
        let e = rel_l2(&spectral, |r| cn.eval(r));
        worst = worst.max(e);
        rows.push(vec![(k as usize).to_string(), num(t), num(e)]);
    }
    run.table("crank_nicolson", csv("index,t,rel_l2", rows));
    run.result("crank_nicolson_worst_rel_l2", worst);
    run.check("spectral heat evolution matches Crank–Nicolson", worst < cn_tol, format!("worst relative L² error {worst:e} (tolerance {cn_tol:e})"));
    Ok(())
}

pub(super) fn riesz_params() -> Vec<Param> {
    vec![
        dim("3", 5),
        param("s", Kind::Float(Interval::open(0.0, 5.0)), "1", "order of the potential"),
        param("samples", Kind::Int { min: 4, max: 500 }, "24", "sampled exterior geometries"),
        param("closed_form_tol", Kind::Float(FRACTION), "1e-5", "tolerance of the whole-space closed form"),
        param("spread_max", Kind::Float(POSITIVE), "10", "largest kernel/shape ratio spread"),
        param("slope_tol", Kind::Float(FRACTION), "0.02", "relative change of the boundary slope"),
        param("symmetry_tol", Kind::Float(FRACTION), "1e-6", "relative symmetry defect"),
    ]
}

pub(super) fn riesz_check(p: &Params) -> Vec<Diagnostic> {
    let (d, s) = (p.int("d") as f64, p.float("s"));
    if s >= d {
        return vec![p.diag("s", format!("Riesz potentials need s < d = {d}"))];
    }
    Vec::new()
}

pub(super) fn riesz_verify(cfg: &ExperimentConfig, run: &mut Run) -> extlap::Result<()> {
    let p = &cfg.params;
    let (d, s) = (p.uint("d"), p.float("s"));
    let tol = p.float("closed_form_tol");
    run.stage("whole-space", &["riesz_kernel_whole", "riesz_constant"], &[("closed_form_tol", tol), ("rel_tol", 1e-9)]);
    let mut worst: f64 = 0.0;
    for rho in [0.05, 1.0, 7.0] {
        let k = riesz_kernel_whole(d, s, rho, 1e-9)?;
        let exact = riesz_constant(d, s) * rho.powf(s - d as f64);
        worst = worst.max((k.value - exact).abs() / exact);
    }
    run.result("whole_space_worst_rel_err", worst);
    run.check("heat-integral Riesz kernel matches the closed form", worst < tol, format!("worst relative error {worst:e}"));

    let tq = TimeQuadrature::default();
    let spread_max = p.float("spread_max");
    run.stage("exterior", &["riesz_kernel", "riesz_shape"], &[("rel_tol", tq.rel_tol), ("spread_max", spread_max)]);
    let geoms: Vec<(f64, f64, f64)> = sample_geometries(p.int("samples") as usize, cfg.seed())
        .into_iter()
        .map(|(r, rp, c, _)| (r, rp, c))
        .filter(|&(r, rp, c)| r * r + rp * rp - 2.0 * r * rp * c > 1e-6)
        .collect();
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let mut dominated = true;
    for &(r, rp, c) in &geoms {
        let k = riesz_kernel(d, s, r, rp, c, &tq)?;
        let rho = (r * r + rp * rp - 2.0 * r * rp * c).sqrt();
        let free = riesz_constant(d, s) * rho.powf(s - d as f64);
        dominated &= k.value > 0.0 && k.value <= free * (1.0 + 1e-9);
        let q = k.value / riesz_shape(d, s, r, rp, c);
        ratios.push(q);
        rows.push(vec![num(r), num(rp), num(c), num(k.value), num(k.err), num(free), num(q)]);
    }
    run.table("riesz_exterior", csv("r,rprime,cos_theta,kernel,err,free_kernel,shape_ratio", rows));
    let sp = spread(&ratios);
    let fitted = ratios.iter().copied().fold(0.0, f64::max);
    run.result("shape_constant", fitted);
    run.result("shape_spread", sp);
    run.check("exterior kernel is positive and below the free kernel", dominated, format!("{} geometries", geoms.len()));
    run.check("kernel/shape ratio spread below spread_max", sp < spread_max, format!("spread {sp:.4}, fitted constant {fitted:.4}"));

    let (slope_tol, sym_tol) = (p.float("slope_tol"), p.float("symmetry_tol"));
    run.stage("boundary-and-symmetry", &["riesz_kernel"], &[("slope_tol", slope_tol), ("symmetry_tol", sym_tol)]);
    let slope: Vec<f64> = [1e-2, 1e-3].iter().map(|&e| riesz_kernel(d, s, 1.0 + e, 3.0, 0.0, &tq).map(|k| k.value / e)).collect::<extlap::Result<_>>()?;
    let change = (slope[0] - slope[1]).abs() / slope[1];
    run.check("kernel vanishes linearly at the boundary", change < slope_tol, format!("slopes {:e}, {:e}", slope[0], slope[1]));
    let a = riesz_kernel(d, s, 1.3, 2.5, 0.3, &tq)?.value;
    let b = riesz_kernel(d, s, 2.5, 1.3, 0.3, &tq)?.value;
    let defect = (a - b).abs() / a;
    run.check("kernel is symmetric", defect < sym_tol, format!("relative defect {defect:e}"));
    let by_angle: Vec<f64> = [0.9, 0.4, -0.3, -1.0].iter().map(|&c| riesz_kernel(d, s, 1.5, 2.0, c, &tq).map(|k| k.value)).collect::<extlap::Result<_>>()?;
    run.check("kernel decreases with the angle", by_angle.windows(2).all(|w| w[1] < w[0]), format!("{by_angle:?}"));
    run.result("boundary_slopes", slope);
    run.result("angle_profile", by_angle);
    Ok(())
}
