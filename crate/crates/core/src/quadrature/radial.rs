//! Radial L^p norms on Ω = {|x| > 1} and ℝ^d, and the angular reduction of
//! d-dimensional integrals.

use std::f64::consts::PI;
use std::sync::Arc;

use super::adaptive::{integrate_breakpoints_lenient, IntegralResult, QuadOptions, Singular};
use super::semi_infinite::{integrate_semiinfinite_with, Decay};
use crate::error::{invalid, Error, Result};
use crate::radial::{RadialFunction, Tail};
use crate::report::{Divergence, NormReport};
use crate::specfun::gamma::gamma_unchecked;

/// Surface area ω_{d−1} = 2π^{d/2}/Γ(d/2) of the unit sphere in ℝ^d.
pub fn sphere_area(d: u32) -> f64 {
    2.0 * PI.powf(d as f64 / 2.0) / gamma_unchecked(d as f64 / 2.0)
}

/// Polar measure ω_{d−1} r^{d−1} dr on (lower, ∞), lower = 1 for Ω and 0 for ℝ^d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialMeasure {
    d: u32,
    lower: f64,
}

impl RadialMeasure {
    pub fn new(d: u32, lower: f64) -> Result<Self> {
        if d < 3 {
            return Err(invalid(format!("dimension must be at least 3, got {d}")));
        }
        if lower != 0.0 && lower != 1.0 {
            return Err(invalid("inner radius must be 0 (whole space) or 1 (exterior)")); 
        }
        Ok(Self { d, lower })
    }

    pub fn exterior(d: u32) -> Result<Self> {
        Self::new(d, 1.0)
    }

    pub fn whole_space(d: u32) -> Result<Self> {
        Self::new(d, 0.0)
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn weight_exponent(&self) -> u32 {
        self.d - 1
    }

    pub fn sphere_constant(&self) -> f64 {
        sphere_area(self.d)
    }
}

/// Radial weight multiplying f inside the norm.
#[derive(Clone)]
pub enum Weight {
    None,
    /// (r − 1)^{−s}: the boundary-distance weight of the Hardy inequalities on Ω.
    DistPower(f64),
    /// r^{−s}: the classical Hardy weight on ℝ^d.
    RadiusPower(f64),
    /// A bounded weight.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl Weight {
    fn eval(&self, r: f64) -> f64 {
        match self {
            Weight::None => 1.0,
            Weight::DistPower(s) => (r - 1.0).powf(-s),
            Weight::RadiusPower(s) => r.powf(-s),
            Weight::Custom(w) => w(r),
        }
    }

    /// Singular point and the power of r the weight behaves like at infinity.
    fn singular_point(&self) -> Option<f64> {
        match self {
            Weight::DistPower(s) if *s > 0.0 => Some(1.0),
            Weight::RadiusPower(s) if *s > 0.0 => Some(0.0),
            _ => None,
        }
    }

    fn decay_at_infinity(&self) -> f64 {
        match self {
            Weight::DistPower(s) | Weight::RadiusPower(s) => *s,
            _ => 0.0,
        }
    }
}

/// Dyadic levels scanned for divergence at a singular point; δ = 2^{−30} ≈ 1e-9 still
/// resolves r = 1 + δ to about seven digits.
const SCAN_LEVELS: i32 = 30;

/// (ω_{d−1} ∫ |f(r) w(r)|^p r^{d−1} dr)^{1/p} over the measure's range.
///
/// When the weight is singular at a point the support reaches, partial integrals over
/// [σ + 2^{−n}, ·] are scanned first; growth by more than 5% for five consecutive n
/// with non-shrinking increments is reported as divergence with the fitted exponent.
pub fn lp_norm_radial(
    f: &RadialFunction,
    p: f64,
    m: &RadialMeasure,
    weight: &Weight,
) -> Result<NormReport> {
    lp_norm_radial_with(f, p, m, weight, &QuadOptions::with_tol(1e-10))
}

pub fn lp_norm_radial_with(
    f: &RadialFunction,
    p: f64,
    m: &RadialMeasure,
    weight: &Weight,
    opts: &QuadOptions,
) -> Result<NormReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("exponent p must lie in [1, ∞), got {p}")));
    }
    if f.d() != m.d() {
        return Err(invalid("function and measure disagree on the dimension"));
    }
    let tag = "lp_norm_radial";
    let s = weight.decay_at_infinity();
    let dm1 = (m.d() - 1) as i32;
    let integrand = |r: f64| {
        let v = f.modulus(r) * weight.eval(r);
        if v == 0.0 {
            0.0
        } else {
            v.powf(p) * r.powi(dm1)
        }
    };

    let support = f.support();
    let lo = support.lo.max(m.lower());
    let hi = support.hi;
    if lo >= hi {
        return Ok(NormReport::new(tag, p, s, 0.0, 0.0));
    }
    let mut points = vec![lo];
    points.extend(support.breaks.iter().copied().filter(|&b| b > lo && b < hi));
    points.push(hi);

    let singular = weight.singular_point().filter(|&sp| lo <= sp + 1e-12);
    if let Some(sp) = singular {
        if let Some(div) = divergence_scan(&integrand, sp, &points, opts)? {
            let mut rep = NormReport::new(tag, p, s, f64::INFINITY, f64::INFINITY);
            rep.divergence = Some(div);
            return Ok(rep);
        }
    }

    let body_opts = opts.clone().singular(if singular.is_some() { Singular::Lower } else { Singular::None });
    let (body, ok) = integrate_breakpoints_lenient(integrand, &points, &body_opts)?;
    if !ok {
        return Err(non_convergence(body));
    }
    let mut total = body.value;
    let mut err = body.abs_error_estimate;

    match support.tail {
        Tail::Compact => {}
        Tail::Gaussian { scale } => {
            let t = integrate_semiinfinite_with(integrand, hi, opts, Decay::Gaussian { sigma: scale / p.sqrt() })?;
            total += t.value;
            err += t.abs_error_estimate;
        }
        Tail::Power { q } => {
            let q_int = p * (q + s) - dm1 as f64;
            if q_int <= 1.0 {
                let mut rep = NormReport::new(tag, p, s, f64::INFINITY, f64::INFINITY);
                rep.divergence = Some(Divergence {
                    singular_point: f64::INFINITY,
                    slope: 1.0 - q_int,
                    partials: Vec::new(),
                });
                return Ok(rep);
            }
            let t = integrate_semiinfinite_with(integrand, hi, opts, Decay::Power { q: q_int })?;
            total += t.value;
            err += t.abs_error_estimate;
        }
    }

    let c = m.sphere_constant();
    let integral = c * total;
    let value = integral.powf(1.0 / p);
    let error = if integral > 0.0 { value / p * (c * err) / integral } else { (c * err).powf(1.0 / p) };
    Ok(NormReport::new(tag, p, s, value, error))
}

fn non_convergence(res: IntegralResult) -> Error {
    Error::NonConvergence {
        what: "radial L^p norm".into(),
        estimate: res.value,
        error: res.abs_error_estimate,
    }
}

fn divergence_scan(
    integrand: &dyn Fn(f64) -> f64,
    sp: f64,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<Option<Divergence>> {
    let hi = *points.last().expect("points");
    let far = (sp + 1.0).min(hi);
    // Fixed part beyond σ + 1.
    let mut partial = if far < hi {
        let mut rest = vec![far];
        rest.extend(points.iter().copied().filter(|&b| b > far));
        let (r, _) = integrate_breakpoints_lenient(integrand, &rest, opts)?;
        r.value
    } else {
        0.0
    };
    let mut partials = Vec::new();
    let mut increments = Vec::new();
    let mut streak = 0;
    let mut growing = false;
    for n in 1..=SCAN_LEVELS {
        let a = sp + 2f64.powi(-n);
        let b = (sp + 2f64.powi(1 - n)).min(far);
        let inc = if a < b {
            integrate_breakpoints_lenient(integrand, &[a, b], opts)?.0.value
        } else {
            0.0
        };
        let prev = partial;
        partial += inc;
        partials.push((2f64.powi(-n), partial));
        increments.push(inc);
        if prev > 0.0 && partial > 1.05 * prev {
            streak += 1;
        } else {
            streak = 0;
        }
        if streak >= 5 {
            growing = true;
        }
    }
    if !growing {
        return Ok(None);
    }
    let slope = fitted_growth(&increments);
    if slope <= 0.0 {
        return Ok(None);
    }
    Ok(Some(Divergence { singular_point: sp, slope, partials }))
}

/// Exponent κ with increments ∝ 2^{nκ}, least squares over the last ten levels.
pub(crate) fn fitted_growth(increments: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = increments
        .iter()
        .enumerate()
        .rev()
        .take(10)
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| ((i + 1) as f64, v.log2()))
        .collect();
    if pts.len() < 3 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// ∫₀^π g(θ) sin^{d−2}θ dθ.
pub fn angular_integral(g: impl Fn(f64) -> f64, d: u32) -> Result<IntegralResult> {
    angular_integral_with(g, d, &QuadOptions::with_tol(1e-10))
}

pub fn angular_integral_with(
    g: impl Fn(f64) -> f64,
    d: u32,
    opts: &QuadOptions,
) -> Result<IntegralResult> {
    if d < 2 {
        return Err(invalid("angular reduction needs d ≥ 2"));
    }
    let k = (d - 2) as i32;
    let (res, ok) = integrate_breakpoints_lenient(|t| g(t) * t.sin().powi(k), &[0.0, PI], opts)?;
    if ok {
        Ok(res)
    } else {
        Err(non_convergence(res))
    }
}

/// ∫₀^π sin^{d−2}θ dθ = √π Γ((d−1)/2)/Γ(d/2).
pub fn sphere_angular_mass(d: u32) -> f64 {
    PI.sqrt() * gamma_unchecked((d as f64 - 1.0) / 2.0) / gamma_unchecked(d as f64 / 2.0)
}
