//! Riesz potentials of the exterior Dirichlet Laplacian, Hardy ratios for both Laplacians,
//! the weighted Schur test, and the norm-equivalence ratio.

mod schur;
mod weights;

pub use schur::{
    difference_kernel, far_region_kernel, schur_bound, schur_integral, schur_sweep, sup_grid, KernelFn, SchurKernel,
    SchurLevel, SchurOptions, SchurReport, Side, SideIntegral, Space, ToyKernel,
};
pub use weights::{boundary_distance, region_weight, Pair, Region, WeightFamily, WeightSpec};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{invalid, Result};
use crate::heat::{exterior_kernel_polar, gauss_from_dist2, Geometry, DEFAULT_ELL_MAX};
use crate::quadrature::{integrate_vec, lp_norm_radial, QuadOptions, RadialMeasure, Weight};
use crate::radial::RadialFunction;
use crate::report::NormReport;
use crate::specfun::gamma::gamma_unchecked;
use crate::transforms::frac_power;

/// Controls of the time integral (1/Γ(s/2)) ∫₀^∞ t^{s/2} p_t dt/t.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeQuadrature {
    pub rel_tol: f64,
    /// The integral is computed numerically up to T = tail_factor·(max(r, r′) + 1)², where
    /// the exterior kernel has reached its large-time form; the rest is closed-form.
    pub tail_factor: f64,
    pub ell_max: u32,
}

impl Default for TimeQuadrature {
    fn default() -> Self {
        Self { rel_tol: 1e-7, tail_factor: 1e4, ell_max: DEFAULT_ELL_MAX }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RieszSample {
    pub geometry: Geometry,
    pub s: f64,
    pub value: f64,
    /// Time-quadrature error plus the propagated kernel errors plus a tail allowance.
    pub err: f64,
}

/// c_{d,s} = Γ((d−s)/2) / (4^{s/2} π^{d/2} Γ(s/2)), so that (−Δ)^{−s/2} has kernel c_{d,s}|x−y|^{s−d}.
pub fn riesz_constant(d: u32, s: f64) -> f64 {
    let d = d as f64;
    gamma_unchecked((d - s) / 2.0) / (4f64.powf(s / 2.0) * PI.powf(d / 2.0) * gamma_unchecked(s / 2.0))
}

fn check_riesz(d: u32, s: f64) -> Result<()> {
    if !(s > 0.0 && s < d as f64) {
        return Err(invalid(format!("Riesz potentials need 0 < s < d, got s = {s}, d = {d}")));
    }
    Ok(())
}

/// ∫ t^{s/2} k(t) d(ln t) over [ln t0, ln T] with a two-component integrand (value, error).
fn time_integral(k: impl Fn(f64) -> (f64, f64), s: f64, t0: f64, t1: f64, rel_tol: f64) -> Result<(f64, f64)> {
    let (lo, hi) = (t0.ln(), t1.ln());
    // Break at every e-fold so that the Gaussian onset is resolved.
    let n = ((hi - lo).ceil() as usize).max(1);
    let pts: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let (res, _) = integrate_vec(
        |v, out: &mut [f64]| {
            let t = v.exp();
            let (val, err) = k(t);
            let w = t.powf(s / 2.0);
            out[0] = w * val;
            out[1] = w * err;
        },
        2,
        &pts,
        &QuadOptions::with_tol(rel_tol).budget(40_000),
    )?;
    Ok((res.values[0], res.errors[0] + res.values[1].abs()))
}

/// Kernel of (−Δ_Ω)^{−s/2} at the polar geometry (r, r′, cos θ).
pub fn riesz_kernel(d: u32, s: f64, r: f64, rprime: f64, cos_theta: f64, tq: &TimeQuadrature) -> Result<RieszSample> {
    check_riesz(d, s)?;
    let geometry = Geometry::Polar { r, rprime, cos_theta };
    if r <= 1.0 || rprime <= 1.0 {
        if r < 1.0 || rprime < 1.0 {
            return Err(invalid("Riesz kernel points must lie in the exterior domain"));
        }
        return Ok(RieszSample { geometry, s, value: 0.0, err: 0.0 });
    }
    let rho2 = r * r + rprime * rprime - 2.0 * r * rprime * cos_theta;
    if rho2 <= 0.0 {
        return Err(invalid("the Riesz kernel is singular on the diagonal"));
    }
    let t0 = rho2 / 160.0;
    let t1 = tq.tail_factor * (r.max(rprime) + 1.0).powi(2);
    let (body, err) = time_integral(
        |t| match exterior_kernel_polar(d, r, rprime, cos_theta, t, tq.ell_max) {
            Ok(k) => (k.value, k.err),
            Err(_) => (f64::NAN, f64::NAN),
        },
        s,
        t0,
        t1,
        tq.rel_tol,
    )?;
    if !body.is_finite() {
        return Err(crate::error::Error::NonConvergence {
            what: "exterior heat kernel inside the Riesz time integral".into(),
            estimate: body,
            error: err,
        });
    }
    // p_t ≈ (4πt)^{−d/2} h(r) h(r′) for t ≥ T, h(r) = 1 − r^{2−d}.
    let a = (d as f64 - s) / 2.0;
    let h = |x: f64| 1.0 - x.powi(2 - d as i32);
    let tail = (4.0 * PI).powf(-(d as f64) / 2.0) * h(r) * h(rprime) * t1.powf(-a) / a;
    let g = gamma_unchecked(s / 2.0);
    let value = (body + tail) / g;
    // The large-time form is accurate to O(max(r, r′)²/T) relative.
    let tail_err = tail.abs() * 10.0 * (r.max(rprime) + 1.0).powi(2) / t1;
    Ok(RieszSample { geometry, s, value, err: (err + tail_err) / g })
}

/// Whole-space Riesz kernel by the same time integral of the Gaussian.
pub fn riesz_kernel_whole(d: u32, s: f64, rho: f64, rel_tol: f64) -> Result<RieszSample> {
    check_riesz(d, s)?;
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(invalid("distance must be positive"));
    }
    let rho2 = rho * rho;
    let t0 = rho2 / 160.0;
    let t1 = 1e4 * (rho2 + 1.0);
    let (body, err) = time_integral(|t| (gauss_from_dist2(d, rho2, t), 0.0), s, t0, t1, rel_tol)?;
    // e^{−ρ²/4t} = 1 − ρ²/4t + O(t^{−2}) beyond T.
    let a = (d as f64 - s) / 2.0;
    let c = (4.0 * PI).powf(-(d as f64) / 2.0);
    let tail = c * (t1.powf(-a) / a - 0.25 * rho2 * t1.powf(-a - 1.0) / (a + 1.0));
    let g = gamma_unchecked(s / 2.0);
    Ok(RieszSample {
        geometry: Geometry::Polar { r: rho, rprime: 0.0, cos_theta: 1.0 },
        s,
        value: (body + tail) / g,
        err: (err + c * (rho2 / t1).powi(2) * t1.powf(-a)) / g,
    })
}

/// |x−y|^{s−d} (d(x)/(|x−y| ∧ 2) ∧ 1)(d(y)/(|x−y| ∧ 2) ∧ 1), the expected size of the
/// exterior Riesz kernel.
pub fn riesz_shape(d: u32, s: f64, r: f64, rprime: f64, cos_theta: f64) -> f64 {
    let rho = (r * r + rprime * rprime - 2.0 * r * rprime * cos_theta).max(0.0).sqrt();
    let m = rho.min(crate::domain::OBSTACLE_DIAMETER);
    let f = |x: f64| (boundary_distance(x) / m).min(1.0);
    rho.powf(s - d as f64) * f(r) * f(rprime)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HardyOperator {
    Euclidean,
    Dirichlet,
}

fn check_hardy(s: f64, p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("exponent p must lie in (1, ∞), got {p}")));
    }
    if !(0.0..=4.0).contains(&s) {
        return Err(invalid(format!("smoothness s must lie in [0, 4], got {s}")));
    }
    Ok(())
}

/// ‖f/d^s‖_{L^p(Ω)} / ‖(−Δ)^{s/2} f‖_{L^p}, with d(r) = r − 1 and the fractional power taken
/// in ℝ^d (f extended by zero) or in Ω. A divergent weighted norm carries its growth rate.
pub fn hardy_ratio(f: &RadialFunction, s: f64, p: f64, op: HardyOperator) -> Result<NormReport> {
    check_hardy(s, p)?;
    let d = f.d();
    let mut num = lp_norm_radial(f, p, &RadialMeasure::exterior(d)?, &Weight::DistPower(s))?;
    num.s = s;
    let domain = match op {
        HardyOperator::Euclidean => DomainSpec::whole(d)?,
        HardyOperator::Dirichlet => DomainSpec::exterior(d)?,
    };
    let den = smoothness_norm(f, s, p, domain)?;
    let tag = match op {
        HardyOperator::Euclidean => "hardy_euclidean",
        HardyOperator::Dirichlet => "hardy_dirichlet",
    };
    Ok(NormReport::ratio(tag, num, den))
}

/// ‖f/|x|^s‖_{L^p(ℝ^d)} / ‖(−Δ)^{s/2} f‖_{L^p(ℝ^d)}: the weight is singular at the origin
/// and fails to be locally integrable against |f|^p once s ≥ d/p.
pub fn classical_hardy_ratio(f: &RadialFunction, s: f64, p: f64) -> Result<NormReport> {
    check_hardy(s, p)?;
    let d = f.d();
    let mut num = lp_norm_radial(f, p, &RadialMeasure::whole_space(d)?, &Weight::RadiusPower(s))?;
    num.s = s;
    let den = smoothness_norm(f, s, p, DomainSpec::whole(d)?)?;
    Ok(NormReport::ratio("hardy_classical", num, den))
}

/// ‖(−Δ)^{s/2} f‖_{L^p(domain)}.
pub fn smoothness_norm(f: &RadialFunction, s: f64, p: f64, domain: DomainSpec) -> Result<NormReport> {
    let g = frac_power(s, f, domain)?;
    let measure = match domain.kind {
        crate::domain::DomainKind::ExteriorBall => RadialMeasure::exterior(domain.d)?,
        _ => RadialMeasure::whole_space(domain.d)?,
    };
    let mut n = lp_norm_radial(&g, p, &measure, &Weight::None)?;
    n.s = s;
    Ok(n)
}

/// ‖(−Δ)^{s/2} f‖_{L^p(ℝ^d)} / ‖(−Δ_Ω)^{s/2} f‖_{L^p(Ω)} for f supported in Ω.
pub fn norm_equivalence_ratio(f: &RadialFunction, s: f64, p: f64) -> Result<NormReport> {
    check_hardy(s, p)?;
    let d = f.d();
    let num = smoothness_norm(f, s, p, DomainSpec::whole(d)?)?;
    let den = smoothness_norm(f, s, p, DomainSpec::exterior(d)?)?;
    Ok(NormReport::ratio("norm_equivalence", num, den))
}
