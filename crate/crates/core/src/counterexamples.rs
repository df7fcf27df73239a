//! Two ways the Dirichlet and whole-space Sobolev scales part company outside the ball,
//! reproduced quantitatively in d = 3.
//!
//! * Gradient counterexample (p > d): f = χ·u with u the λ-mode and χ a smooth cutoff of
//!   the annulus 1 + ε < r < R. As λ, ε → 0 and R → ∞, ‖∇f‖_p stays of order one while
//!   ‖(−Δ_Ω)^{1/2} f‖_p → 0.
//! * Hardy endpoint (s ≥ 1 + 1/p): a heat-smoothed bump vanishes only linearly at the
//!   boundary, so ‖f/d^s‖_p = ∞ while ‖(−Δ_Ω)^{s/2} f‖_p < ∞.
//!
//! For radial f = v(r − 1)/r in d = 3, the Dirichlet Laplacian acts as −∂² on v with
//! v(0) = 0. Hence (−Δ_Ω)^{1/2} f = (1/r)·|D| v_odd. Here |D| = H∂, and H is the Hilbert transform,
//!   |D| v_odd(x) = (1/π) ∫₀^∞ [w(x−t) − w(x+t)]/t dt,   w = v_odd′ (even).
//! All arithmetic near the boundary is done in s = r − 1 so that ε ≪ 1 keeps full precision.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::DomainSpec;
use crate::error::{invalid, Error, Result};
use crate::fit::linear_fit;
use crate::quadrature::rules::gl16;
use crate::quadrature::{integrate_breakpoints_lenient, lp_norm_radial, sphere_area, QuadOptions, RadialMeasure, Weight};
use crate::radial::{bump_profile, RadialFunction, Support};
use crate::report::NormReport;
use crate::specfun::{eigenmode, EigenmodeQuery};
use crate::transforms::{forward, Multiplier, SpectralGrid};

/// Largest slope of the cutoff profile φ; ‖χ′‖_∞ ≤ PHI_SLOPE_MAX/ε for R ≥ ε.
pub const PHI_SLOPE_MAX: f64 = 1.875;

fn only_d3(d: u32) -> Result<()> {
    if d == 3 {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("the counterexample runs use the d = 3 half-line reduction, got d = {d}")))
    }
}

/// φ and its first two derivatives: 1 on x ≤ 1, 0 on x ≥ 2, and 1 − S(x − 1) between,
/// with S(u) = 6u⁵ − 15u⁴ + 10u³ the C² smoothstep.
pub fn phi(x: f64) -> [f64; 3] {
    if x <= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    if x >= 2.0 {
        return [0.0, 0.0, 0.0];
    }
    let u = x - 1.0;
    let s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    let s1 = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    let s2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
    [1.0 - s, -s1, -s2]
}

/// χ(r) = φ(r/R) − φ((r − 1)/ε): 0 below r = 1 + ε, 1 on [1 + 2ε, R], 0 beyond 2R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffSpec {
    pub eps: f64,
    pub r_outer: f64,
}

impl CutoffSpec {
    pub fn new(eps: f64, r_outer: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 0.25) {
            return Err(invalid(format!("cutoff width must lie in (0, 1/4), got {eps}")));
        }
        if !(r_outer > 4.0 && r_outer.is_finite()) {
            return Err(invalid(format!("outer cutoff radius must exceed 4, got {r_outer}")));
        }
        Ok(Self { eps, r_outer })
    }

    /// χ, χ′, χ″ at r = 1 + s.
    pub fn at(&self, s: f64) -> [f64; 3] {
        let r = self.r_outer;
        let [a0, a1, a2] = phi((1.0 + s) / r);
        let [b0, b1, b2] = phi(s / self.eps);
        let e = self.eps;
        [a0 - b0, a1 / r - b1 / e, a2 / (r * r) - b2 / (e * e)]
    }

    /// Values of s = r − 1 where χ stops being locally polynomial.
    pub fn features(&self) -> [f64; 4] {
        [self.eps, 2.0 * self.eps, self.r_outer - 1.0, 2.0 * self.r_outer - 1.0]
    }
}

pub fn cutoff_chi(spec: CutoffSpec, d: u32) -> Result<RadialFunction> {
    let sup = Support::compact(1.0, 2.0 * spec.r_outer)
        .with_breaks(spec.features().iter().map(|s| 1.0 + s).collect());
    RadialFunction::analytic(d, 0, move |r| spec.at(r - 1.0)[0], sup)
}

/// f = χ·u with u(r) = 2 sin(λ(r − 1))/(πλ r), the d = 3 Dirichlet λ-mode; f = v(r − 1)/r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedMode {
    pub lambda: f64,
    pub cutoff: CutoffSpec,
}

impl TruncatedMode {
    pub fn new(lambda: f64, cutoff: CutoffSpec) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("mode frequency must be positive, got {lambda}")));
        }
        Ok(Self { lambda, cutoff })
    }

    /// v, v′, v″ at s, with v = χ·U and U(s) = 2 sin(λs)/(πλ).
    pub fn v(&self, s: f64) -> [f64; 3] {
        let l = self.lambda;
        let (sn, cs) = (l * s).sin_cos();
        let u = [2.0 * sn / (PI * l), 2.0 * cs / PI, -2.0 * l * sn / PI];
        let c = self.cutoff.at(s);
        [c[0] * u[0], c[1] * u[0] + c[0] * u[1], c[2] * u[0] + 2.0 * c[1] * u[1] + c[0] * u[2]]
    }

    pub fn mode(&self, r: f64) -> f64 {
        let l = self.lambda;
        2.0 * (l * (r - 1.0)).sin() / (PI * l * r)
    }

    /// ∂_r f at r = 1 + s.
    pub fn radial_derivative(&self, s: f64) -> f64 {
        let r = 1.0 + s;
        let [v0, v1, _] = self.v(s);
        v1 / r - v0 / (r * r)
    }

    pub fn support_end(&self) -> f64 {
        2.0 * self.cutoff.r_outer - 1.0
    }

    pub fn to_radial(&self) -> Result<RadialFunction> {
        let m = *self;
        let sup = Support::compact(1.0, 2.0 * self.cutoff.r_outer)
            .with_breaks(self.cutoff.features().iter().map(|s| 1.0 + s).collect());
        RadialFunction::analytic(3, 0, move |r| m.v(r - 1.0)[0] / r, sup)
    }
}

/// Break points on [lo, hi]: every power of two, every feature and its dyadic neighbours.
fn break_points(lo: f64, hi: f64, features: &[f64], finest: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    let mut x = finest;
    while x < hi {
        if x > lo {
            pts.push(x);
        }
        x *= 2.0;
    }
    for &f in features {
        for j in -6..=6 {
            let y = f * 2f64.powi(j);
            if y > lo && y < hi {
                pts.push(y);
            }
        }
        for k in 1..8 {
            let y = f + k as f64 * f / 8.0;
            if y > lo && y < hi {
                pts.push(y);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * b.abs().max(1e-300));
    pts
}

/// ∫ g over the break intervals with GL16: `k·(1 + ⌈λ·length⌉)` panels per interval below
/// `oscillating_until`, where g carries the mode's oscillation, and k panels beyond.
fn composite(g: &(dyn Fn(f64) -> f64 + Sync), pts: &[f64], lambda: f64, oscillating_until: f64, k: usize) -> f64 {
    let (x, w) = gl16();
    pts.par_windows(2)
        .map(|iv| {
            let (a, b) = (iv[0], iv[1]);
            let n = if a < oscillating_until { k * (1 + (lambda * (b - a)).ceil() as usize) } else { k };
            let h = (b - a) / n as f64;
            let mut acc = 0.0;
            for j in 0..n {
                let (lo, hi) = (a + j as f64 * h, a + (j + 1) as f64 * h);
                let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
                acc += x.iter().zip(w).map(|(xi, wi)| wi * half * g(mid + half * xi)).sum::<f64>();
            }
            acc
        })
        .collect::<Vec<_>>()
        .iter()
        .sum()
}

/// (1/π) ∫₀^{x+S} [w(x−t) − w(x+t)]/t dt for the even extension w(y) = g(|y|) of a
/// function g supported in [0, S] with kinks at `features`.
fn hilbert_of_even(g: &dyn Fn(f64) -> f64, features: &[f64], support: f64, x: f64) -> f64 {
    let w = |y: f64| {
        let a = y.abs();
        if a >= support {
            0.0
        } else {
            g(a)
        }
    };
    let top = x + support;
    let mut pts = vec![0.0, top, x];
    for &y in features.iter().chain(std::iter::once(&support)) {
        for t in [(x - y).abs(), x + y] {
            if t > 0.0 && t < top {
                pts.push(t);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * top);
    let opts = QuadOptions::with_tol(1e-10).abs(1e-15).budget(200_000);
    let (res, _) =
        integrate_breakpoints_lenient(|t| (w(x - t) - w(x + t)) / t, &pts, &opts).unwrap_or({
            (crate::quadrature::IntegralResult { value: f64::NAN, abs_error_estimate: f64::INFINITY, evaluations: 0 }, false)
        });
    res.value / PI
}

/// (−Δ_Ω)^{1/2} f at r = 1 + s.
pub fn dirichlet_half_power(m: &TruncatedMode, s: f64) -> f64 {
    let g = |y: f64| m.v(y)[1];
    hilbert_of_even(&g, &m.cutoff.features(), m.support_end(), s) / (1.0 + s)
}

/// (−Δ)^{1/2} f at radius r for f extended by zero into the ball: here f = V(r)/r with
/// V(r) = v(r − 1) on r ≥ 1.
pub fn whole_half_power(m: &TruncatedMode, r: f64) -> f64 {
    let g = |y: f64| if y <= 1.0 { 0.0 } else { m.v(y - 1.0)[1] };
    let feats: Vec<f64> = m.cutoff.features().iter().map(|f| 1.0 + f).collect();
    hilbert_of_even(&g, &feats, 1.0 + m.support_end(), r) / r
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScheduleParams {
    pub n: u32,
    pub lambda: f64,
    pub eps: f64,
    pub r_outer: f64,
}

/// λ_n = ε_n = 2^{−n} and R_n = 2^{n+4} for n = 3..=22.
pub fn default_schedule() -> Vec<ScheduleParams> {
    (3..=22)
        .map(|n| ScheduleParams { n, lambda: 2f64.powi(-(n as i32)), eps: 2f64.powi(-(n as i32)), r_outer: 2f64.powi(n as i32 + 4) })
        .collect()
}

pub fn validate_schedule(schedule: &[ScheduleParams]) -> Result<()> {
    if schedule.is_empty() {
        return Err(invalid("empty schedule"));
    }
    for w in schedule.windows(2) {
        if !(w[1].lambda < w[0].lambda && w[1].eps < w[0].eps && w[1].r_outer > w[0].r_outer) {
            return Err(invalid("schedule must have λ, ε strictly decreasing and R strictly increasing"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleEntry {
    pub n: u32,
    pub lambda: f64,
    pub eps: f64,
    pub r_outer: f64,
    /// ‖∇f‖_{L^p(ℝ³)}.
    pub a: f64,
    /// The same norm with twice the quadrature panels.
    pub a_refined: f64,
    /// ‖(−Δ)^{1/2} f‖_{L^p(ℝ³)}.
    pub a_riesz: f64,
    /// ‖(−Δ_Ω)^{1/2} f‖_{L^p(Ω)}.
    pub b: f64,
    pub ratio: f64,
    /// (‖f‖_p ‖Δ_Ω f‖_p)^{1/2}.
    pub interp_bound: f64,
    /// ‖u‖_{L^p(r > R)} for the untruncated mode.
    pub tail_norm: f64,
    pub tail_ok: bool,
    /// Largest deviation of the closed-form mode from the eigenmode evaluator.
    pub mode_error: f64,
}

impl ScheduleEntry {
    pub fn a_stable(&self) -> bool {
        (self.a - self.a_refined).abs() < 0.05 * self.a_refined
    }
}

/// lim_{λ→0} ‖∇u‖_p = (2/π)(ω₂/(2p − 3))^{1/p} in d = 3, from ∇u → (2/π) r^{−2}.
pub fn gradient_limit(p: f64) -> f64 {
    (2.0 / PI) * (sphere_area(3) / (2.0 * p - 3.0)).powf(1.0 / p)
}

fn lp_from_integral(i: f64, p: f64) -> f64 {
    (sphere_area(3) * i).powf(1.0 / p)
}

/// Resolution knob of the fixed composite rules (panels per unit oscillation).
const PANELS: usize = 2;

/// L^p norms of a truncated mode f = v(r − 1)/r in d = 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeNorms {
    /// ‖∇f‖_p.
    pub gradient: f64,
    /// ‖∇f‖_p with twice the quadrature panels.
    pub gradient_refined: f64,
    /// ‖(−Δ)^{1/2} f‖_{L^p(ℝ³)}, f extended by zero.
    pub whole_half_power: f64,
    /// ‖(−Δ_Ω)^{1/2} f‖_{L^p(Ω)}.
    pub dirichlet_half_power: f64,
    pub f: f64,
    /// ‖Δ_Ω f‖_p = ‖v″/r‖_p.
    pub laplacian: f64,
}

pub fn mode_norms(m: &TruncatedMode, p: f64) -> Result<ModeNorms> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("exponent p must lie in (1, ∞), got {p}")));
    }
    let (l, eps) = (m.lambda, m.cutoff.eps);
    let feats = m.cutoff.features();
    let end = m.support_end();
    let weighted = |g: f64, s: f64| g.abs().powf(p) * (1.0 + s).powi(2);
    // Norms over the support of f, in s = r − 1.
    let pts = break_points(eps, end, &feats, eps);
    let grad = |s: f64| weighted(m.radial_derivative(s), s);
    let gradient = lp_from_integral(composite(&grad, &pts, l, end, PANELS), p);
    let gradient_refined = lp_from_integral(composite(&grad, &pts, l, end, 2 * PANELS), p);
    let f = lp_from_integral(composite(&|s| weighted(m.v(s)[0] / (1.0 + s), s), &pts, l, end, PANELS), p);
    let laplacian = lp_from_integral(composite(&|s| weighted(m.v(s)[2] / (1.0 + s), s), &pts, l, end, PANELS), p);
    // Half powers are not compactly supported; they decay like r^{−3} beyond the support.
    let far = end * 2f64.powi(12);
    let mut pts_b = vec![0.0];
    pts_b.extend(break_points(eps / 64.0, far, &feats, eps / 64.0));
    let b = composite(&|s| weighted(dirichlet_half_power(m, s), s), &pts_b, l, end, PANELS);
    let feats_r: Vec<f64> = feats.iter().map(|f| 1.0 + f).collect();
    let mut pts_w = vec![0.0];
    pts_w.extend(break_points(0.5, far, &feats_r, eps / 64.0));
    pts_w.extend(break_points(1.0 + eps / 64.0, 2.0, &[1.0 + eps, 1.0 + 2.0 * eps], 1.0));
    pts_w.sort_by(f64::total_cmp);
    pts_w.dedup();
    let w = composite(&|r| whole_half_power(m, r).abs().powf(p) * r * r, &pts_w, l, end + 1.0, PANELS);
    let out = ModeNorms {
        gradient,
        gradient_refined,
        whole_half_power: lp_from_integral(w, p),
        dirichlet_half_power: lp_from_integral(b, p),
        f,
        laplacian,
    };
    let all = [out.gradient, out.gradient_refined, out.whole_half_power, out.dirichlet_half_power, out.f, out.laplacian];
    if all.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence { what: "truncated-mode norms".into(), estimate: out.dirichlet_half_power, error: f64::INFINITY });
    }
    Ok(out)
}

fn entry(d: u32, p: f64, sp: ScheduleParams) -> Result<ScheduleEntry> {
    only_d3(d)?;
    let m = TruncatedMode::new(sp.lambda, CutoffSpec::new(sp.eps, sp.r_outer)?)?;
    let l = sp.lambda;
    let norms = mode_norms(&m, p)?;
    // ‖u‖_{L^p(r>R)}: quadrature to 2^{12}R, then |sin|^p averaged against the r^{2−p} envelope.
    let r0 = sp.r_outer;
    let r1 = r0 * 2f64.powi(12);
    let tail_pts = break_points(r0, r1, &[], r0);
    let body = composite(&|r| m.mode(r).abs().powf(p) * r * r, &tail_pts, l, f64::INFINITY, PANELS);
    let mean_sin_p = crate::specfun::gamma::gamma_unchecked((p + 1.0) / 2.0)
        / (PI.sqrt() * crate::specfun::gamma::gamma_unchecked(p / 2.0 + 1.0));
    let rest = (2.0 / (PI * l)).powf(p) * mean_sin_p * r1.powf(3.0 - p) / (p - 3.0);
    let tail_norm = lp_from_integral(body + rest, p);
    let mode_error = [1.0 + sp.eps, 2.0, 1.0 / l, r0, 3.0 * r0]
        .iter()
        .map(|&r| {
            let e = eigenmode(EigenmodeQuery::new(3, 0, r, l)?)?;
            Ok((e - m.mode(r)).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(ScheduleEntry {
        n: sp.n,
        lambda: l,
        eps: sp.eps,
        r_outer: sp.r_outer,
        a: norms.gradient,
        a_refined: norms.gradient_refined,
        a_riesz: norms.whole_half_power,
        b: norms.dirichlet_half_power,
        ratio: norms.gradient / norms.dirichlet_half_power,
        interp_bound: (norms.f * norms.laplacian).sqrt(),
        tail_norm,
        tail_ok: tail_norm < 0.01 * norms.gradient,
        mode_error,
    })
}

/// Runs the truncated-mode schedule at exponent p > d; entries are computed in parallel and
/// returned in schedule order.
pub fn gradient_counterexample(d: u32, p: f64, schedule: &[ScheduleParams]) -> Result<Vec<ScheduleEntry>> {
    only_d3(d)?;
    if !(p > d as f64 && p.is_finite()) {
        return Err(invalid(format!("the truncated-mode run needs d < p < ∞, got p = {p}")));
    }
    validate_schedule(schedule)?;
    schedule.par_iter().map(|&sp| entry(d, p, sp)).collect()
}

pub fn schedule_csv(entries: &[ScheduleEntry]) -> String {
    let mut out = String::from("n,lambda,eps,R,A,B,A_over_B,A_refined,A_riesz,interp_bound,tail_norm,tail_ok\n");
    for e in entries {
        out.push_str(&format!(
            "{},{:e},{:e},{:e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{}\n",
            e.n, e.lambda, e.eps, e.r_outer, e.a, e.b, e.ratio, e.a_refined, e.a_riesz, e.interp_bound, e.tail_norm, e.tail_ok
        ));
    }
    out
}

/// ‖(−Δ_Ω)^{1/2} f‖_p through the spectral transform, for entries whose support fits the
/// radial grid.
pub fn spectral_half_power_norm(m: &TruncatedMode, p: f64, domain: DomainSpec, grid: &SpectralGrid) -> Result<NormReport> {
    if 2.0 * m.cutoff.r_outer > grid.r_max {
        return Err(invalid("truncated mode does not fit the spectral grid"));
    }
    let f = m.to_radial()?;
    let g = forward(&f, domain, grid)?.apply(&Multiplier::power(1.0)).inverse()?;
    let measure = match domain.kind {
        crate::domain::DomainKind::ExteriorBall => RadialMeasure::exterior(3)?,
        _ => RadialMeasure::whole_space(3)?,
    };
    lp_norm_radial(&g, p, &measure, &Weight::None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndpointReport {
    pub d: u32,
    pub p: f64,
    pub s: f64,
    /// min of g(r)/(r − 1) over the δ-schedule: the linear vanishing at the boundary.
    pub boundary_slope_min: f64,
    /// (δ, ∫_{r ≥ 1+δ} |g/(r−1)^s|^p dx).
    pub partials: Vec<(f64, f64)>,
    /// Log-log slope of the dyadic increments against 1/δ; the exponent (s − 1)p − 1.
    pub increment_slope: f64,
    /// Log-log slope of the partial integrals over the last decade; 0 when they converge.
    pub partial_slope: f64,
    pub predicted_slope: f64,
    pub denominator: NormReport,
    pub divergent: bool,
}

/// Heat profile e^{tΔ_Ω} of the bump centred at 2.5, as an exact spectral synthesis.
pub fn heat_smoothed_bump(t: f64) -> Result<RadialFunction> {
    let bump = RadialFunction::analytic(3, 0, bump_profile(2.5, 0.8, 1.0), Support::compact(1.7, 3.3))?;
    forward(&bump, DomainSpec::exterior(3)?, &SpectralGrid::default())?.apply(&Multiplier::heat(t)).inverse_pointwise()
}

/// Weighted norm ‖g/(r−1)^s‖_p of the heat-smoothed bump g, truncated at r = 1 + δ
/// for δ = 2^{−k}, k ∈ `ks`.
pub fn hardy_endpoint_run(d: u32, p: f64, s: f64, ks: std::ops::RangeInclusive<u32>) -> Result<EndpointReport> {
    only_d3(d)?;
    if !(p > 1.0 && p.is_finite() && s > 0.0 && s <= 4.0) {
        return Err(invalid("need 1 < p < ∞ and 0 < s ≤ 4"));
    }
    let t = 1.0;
    let g = heat_smoothed_bump(t)?;
    let (x, w) = gl16();
    let shell = |a: f64, b: f64| -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        x.iter()
            .zip(w)
            .map(|(xi, wi)| {
                let u = mid + half * xi;
                wi * half * (g.eval(1.0 + u).abs() * u.powf(-s)).powf(p) * (1.0 + u).powi(2)
            })
            .sum::<f64>()
    };
    // Body: u ∈ [1/2, 24] in unit panels, far enough for e^{Δ}(bump) to be negligible.
    let k0 = *ks.start();
    let top = 2f64.powi(-(k0 as i32));
    let mut body = 0.0;
    let mut a = top;
    while a < 24.0 {
        let b = (a + 0.25).min(24.0);
        body += shell(a, b);
        a = b;
    }
    let omega = sphere_area(3);
    let ks: Vec<u32> = ks.collect();
    let incs: Vec<f64> = ks
        .par_iter()
        .map(|&k| {
            let (lo, hi) = (2f64.powi(-(k as i32) - 1), 2f64.powi(-(k as i32)));
            shell(lo, hi)
        })
        .collect();
    let mut partials = Vec::new();
    let mut acc = body;
    let mut slope_min = f64::INFINITY;
    let mut inc_pts = Vec::new();
    for (&k, &inc) in ks.iter().zip(&incs) {
        let delta = 2f64.powi(-(k as i32) - 1);
        acc += inc;
        if !acc.is_finite() {
            break;
        }
        partials.push((delta, (omega * acc).powf(1.0 / p)));
        slope_min = slope_min.min(g.eval(1.0 + delta) / delta);
        if inc > 0.0 {
            inc_pts.push(((1.0 / delta).ln(), inc.ln()));
        }
    }
    if partials.len() < 4 || inc_pts.len() < 4 {
        return Err(Error::NonConvergence {
            what: "weighted partial integrals (fewer than 4 usable schedule points)".into(),
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }
    // Fit the asymptotic half of the schedule.
    let half = inc_pts.len() / 2;
    let (increment_slope, _) = linear_fit(&inc_pts[half..]).ok_or_else(|| invalid("degenerate slope fit"))?;
    let tail: Vec<(f64, f64)> = partials[partials.len().saturating_sub(4)..]
        .iter()
        .map(|(d, v)| ((1.0 / d).ln(), (v.powf(p)).ln()))
        .collect();
    let (partial_slope, _) = linear_fit(&tail).ok_or_else(|| invalid("degenerate slope fit"))?;
    let spec = forward(&bump_for_denominator()?, DomainSpec::exterior(3)?, &SpectralGrid::default())?
        .apply(&Multiplier::heat(t))
        .apply(&Multiplier::power(s));
    let mut denominator = lp_norm_radial(&spec.inverse()?, p, &RadialMeasure::exterior(3)?, &Weight::None)?;
    denominator.s = s;
    let predicted = (s - 1.0) * p - 1.0;
    Ok(EndpointReport {
        d,
        p,
        s,
        boundary_slope_min: slope_min,
        partials,
        increment_slope,
        partial_slope,
        predicted_slope: predicted,
        denominator,
        divergent: predicted >= 0.0 && increment_slope > 0.0,
    })
}

fn bump_for_denominator() -> Result<RadialFunction> {
    RadialFunction::analytic(3, 0, bump_profile(2.5, 0.8, 1.0), Support::compact(1.7, 3.3))
}
