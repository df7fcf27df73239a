//! Littlewood–Paley projections (heat-semigroup and smooth-bump families), square
//! functions, Bernstein checks, and the whole-space/exterior projection differences.
//!
//! Heat family: P̃_N = e^{Δ/N²} − e^{4Δ/N²}, symbol e^{−λ²/N²} − e^{−4λ²/N²}.
//! Bump family: P_N = ψ_N(√−Δ), ψ_N(λ) = φ(λ/N) − φ(2λ/N), φ = 1 on [0,1], 0 on [2,∞).

use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{DomainKind, DomainSpec};
use crate::error::{invalid, Result};
use crate::heat::{exterior_kernel, gauss_kernel, Geometry, KernelSample};
use crate::quadrature::{lp_norm_radial, RadialMeasure, Weight};
use crate::radial::RadialFunction;
use crate::report::NormReport;
use crate::transforms::{forward, Multiplier, SpectralFunction, SpectralGrid};

/// Dyadic frequencies N = 2^j, j_min ≤ j ≤ j_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicRange {
    pub j_min: i32,
    pub j_max: i32,
}

impl Default for DyadicRange {
    fn default() -> Self {
        Self { j_min: -6, j_max: 8 }
    }
}

impl DyadicRange {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max {
            return Err(invalid(format!("empty dyadic range {j_min}..={j_max}")));
        }
        Ok(Self { j_min, j_max })
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (self.j_min..=self.j_max).map(|j| 2f64.powi(j)).collect()
    }

    /// The range extended by `k` octaves on both sides.
    pub fn widened(&self, k: i32) -> Self {
        Self { j_min: self.j_min - k, j_max: self.j_max + k }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ProjectorFamily {
    Heat,
    Bump,
}

/// A projector family and the power k it is raised to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProjectorKind {
    pub family: ProjectorFamily,
    pub k: u32,
}

impl ProjectorKind {
    pub fn heat(k: u32) -> Self {
        Self { family: ProjectorFamily::Heat, k }
    }

    pub fn bump(k: u32) -> Self {
        Self { family: ProjectorFamily::Bump, k }
    }

    /// Smallest admissible heat power for smoothness s: k = 1 for s ≤ 1, k = 2 up to s = 3,
    /// and 2k > s beyond.
    pub fn default_k(s: f64) -> u32 {
        if s <= 1.0 {
            1
        } else {
            ((s / 2.0).floor() as u32 + 1).max(2)
        }
    }

    fn validate(&self, s: f64) -> Result<()> {
        if self.k == 0 {
            return Err(invalid("projector power k must be at least 1"));
        }
        if self.family == ProjectorFamily::Heat && 2.0 * self.k as f64 <= s {
            return Err(invalid(format!("heat square functions need 2k > s, got k = {}, s = {s}", self.k)));
        }
        Ok(())
    }

    /// Symbol of the k-th power of the projector at frequency N.
    pub fn symbol(&self, n: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy + 'static {
        let (family, k) = (self.family, self.k as i32);
        move |l: f64| {
            let base = match family {
                ProjectorFamily::Heat => {
                    let x = (l / n).powi(2);
                    (-x).exp() - (-4.0 * x).exp()
                }
                ProjectorFamily::Bump => bump_piece(l, n),
            };
            base.powi(k)
        }
    }

    pub fn multiplier(&self, n: f64) -> Multiplier {
        let name = match self.family {
            ProjectorFamily::Heat => format!("heat LP N={n} k={}", self.k),
            ProjectorFamily::Bump => format!("bump LP N={n} k={}", self.k),
        };
        Multiplier::real(name, self.symbol(n))
    }
}

/// Smooth cutoff: 1 on [0, 1], 0 on [2, ∞), built from e^{−1/u}.
pub fn cutoff_phi(x: f64) -> f64 {
    let h = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let (a, b) = (h(2.0 - x), h(x - 1.0));
    a / (a + b)
}

/// ψ_N(λ) = φ(λ/N) − φ(2λ/N).
pub fn bump_piece(lambda: f64, n: f64) -> f64 {
    cutoff_phi(lambda / n) - cutoff_phi(2.0 * lambda / n)
}

fn check_dyadic(n: f64) -> Result<()> {
    if n > 0.0 && n.log2().fract() == 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("frequency must be a power of two, got {n}")))
    }
}

/// P_N^k f (bump family) or P̃_N^k f (heat family).
pub fn lp_project(f: &RadialFunction, n: f64, kind: ProjectorKind, domain: DomainSpec) -> Result<RadialFunction> {
    lp_project_with(f, n, kind, domain, &SpectralGrid::default())
}

pub fn lp_project_with(
    f: &RadialFunction,
    n: f64,
    kind: ProjectorKind,
    domain: DomainSpec,
    grid: &SpectralGrid,
) -> Result<RadialFunction> {
    check_dyadic(n)?;
    kind.validate(0.0)?;
    forward(f, domain, grid)?.apply(&kind.multiplier(n)).inverse()
}

#[derive(Debug, Clone)]
pub struct SquareFunction {
    pub function: RadialFunction,
    /// Share of Σ_N N^{2s}‖P_N^k f‖₂² carried by frequencies outside the range
    /// (measured over 30 extra octaves on each side).
    pub tail_fraction: f64,
    pub warning: Option<String>,
}

/// Tail shares above this are flagged.
const TAIL_WARNING: f64 = 1e-6;

/// r ↦ (Σ_{N∈range} N^{2s} |P_N^k f(r)|²)^{1/2}, summed in increasing N.
pub fn square_function(
    f: &RadialFunction,
    s: f64,
    kind: ProjectorKind,
    range: DyadicRange,
    domain: DomainSpec,
) -> Result<SquareFunction> {
    square_function_with(f, s, kind, range, domain, &SpectralGrid::default())
}

pub fn square_function_with(
    f: &RadialFunction,
    s: f64,
    kind: ProjectorKind,
    range: DyadicRange,
    domain: DomainSpec,
    grid: &SpectralGrid,
) -> Result<SquareFunction> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(format!("smoothness s must be non-negative, got {s}")));
    }
    kind.validate(s)?;
    let spec = forward(f, domain, grid)?;
    square_from_spectrum(&spec, s, kind, range)
}

fn square_from_spectrum(spec: &SpectralFunction, s: f64, kind: ProjectorKind, range: DyadicRange) -> Result<SquareFunction> {
    let pieces: Vec<Vec<f64>> = range
        .frequencies()
        .par_iter()
        .map(|&n| -> Result<Vec<f64>> {
            let g = spec.apply(&kind.multiplier(n)).inverse()?;
            let (re, im) = g.samples().expect("inverse transforms are sampled");
            let w = n.powf(2.0 * s);
            Ok(match im {
                Some(im) => re.iter().zip(im).map(|(a, b)| w * (a * a + b * b)).collect(),
                None => re.iter().map(|a| w * a * a).collect(),
            })
        })
        .collect::<Result<_>>()?;
    let grid = spec.basis().r_grid().clone();
    let mut acc = vec![0.0; grid.len()];
    for piece in &pieces {
        for (a, v) in acc.iter_mut().zip(piece) {
            *a += v;
        }
    }
    let values: Vec<f64> = acc.into_iter().map(f64::sqrt).collect();
    let function = RadialFunction::sampled(spec.domain().d, spec.ell(), grid, values, None)?;

    let tail_fraction = spectral_tail(spec, s, kind, range);
    let warning = (tail_fraction > TAIL_WARNING)
        .then(|| format!("{:.2e} of the square-function mass lies outside 2^{}..2^{}", tail_fraction, range.j_min, range.j_max));
    Ok(SquareFunction { function, tail_fraction, warning })
}

/// Plancherel estimate of the out-of-range share of Σ N^{2s}‖P_N^k f‖₂².
fn spectral_tail(spec: &SpectralFunction, s: f64, kind: ProjectorKind, range: DyadicRange) -> f64 {
    let w = spec.basis().lambda_weights();
    let lams = spec.lambdas();
    let (re, im) = spec.coefficients();
    let power: Vec<f64> = (0..lams.len())
        .map(|i| w[i] * (re[i].powi(2) + im.map_or(0.0, |v| v[i].powi(2))))
        .collect();
    let (mut inside, mut total) = (0.0, 0.0);
    for j in range.j_min - 30..=range.j_max + 30 {
        let n = 2f64.powi(j);
        let m = kind.symbol(n);
        let e: f64 = lams.iter().zip(&power).map(|(&l, p)| m(l).powi(2) * p).sum::<f64>() * n.powf(2.0 * s);
        total += e;
        if j >= range.j_min && j <= range.j_max {
            inside += e;
        }
    }
    if total > 0.0 {
        ((total - inside) / total).max(0.0)
    } else {
        0.0
    }
}

fn measure(domain: DomainSpec) -> Result<RadialMeasure> {
    match domain.kind {
        DomainKind::ExteriorBall => RadialMeasure::exterior(domain.d),
        DomainKind::WholeSpace => RadialMeasure::whole_space(domain.d),
        DomainKind::HalfSpace => Err(invalid("radial norms need the whole space or the exterior ball")),
    }
}

/// ‖f‖_{L^p(domain)}; p = ∞ takes the largest modulus over the nodes (sampled f) or
/// 4000 equispaced points of the support (analytic f).
pub fn domain_norm(f: &RadialFunction, p: f64, domain: DomainSpec) -> Result<NormReport> {
    if p == f64::INFINITY {
        let sup = match f.samples() {
            Some((re, im)) => re
                .iter()
                .enumerate()
                .map(|(i, a)| a.hypot(im.map_or(0.0, |v| v[i])))
                .fold(0.0, f64::max),
            None => {
                let sp = f.support();
                (0..=4000).map(|i| f.modulus(sp.lo + (sp.hi - sp.lo) * i as f64 / 4000.0)).fold(0.0, f64::max)
            }
        };
        return Ok(NormReport::new("sup_norm", p, 0.0, sup, 0.0));
    }
    lp_norm_radial(f, p, &measure(domain)?, &Weight::None)
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("exponent p must lie in (1, ∞), got {p}")))
    }
}

/// ‖S_{s,k}(f)‖_p / ‖(−Δ)^{s/2} f‖_p with the heat family and the default dyadic range.
pub fn sq_equivalence_ratio(f: &RadialFunction, s: f64, p: f64, k: u32, domain: DomainSpec) -> Result<NormReport> {
    sq_equivalence_ratio_with(f, s, p, ProjectorKind::heat(k), DyadicRange::default(), domain, &SpectralGrid::default())
}

pub fn sq_equivalence_ratio_with(
    f: &RadialFunction,
    s: f64,
    p: f64,
    kind: ProjectorKind,
    range: DyadicRange,
    domain: DomainSpec,
    grid: &SpectralGrid,
) -> Result<NormReport> {
    check_p(p)?;
    let spec = forward(f, domain, grid)?;
    let sq = square_function_with(f, s, kind, range, domain, grid)?;
    let power = spec.apply(&Multiplier::power(s)).inverse()?;
    let num = domain_norm(&sq.function, p, domain)?;
    let den = domain_norm(&power, p, domain)?;
    let mut rep = NormReport::ratio("sq_equivalence_ratio", tagged(num, "square_function", s), tagged(den, "frac_power", s));
    rep.s = s;
    Ok(rep)
}

fn tagged(mut r: NormReport, tag: &str, s: f64) -> NormReport {
    r.tag = tag.into();
    r.s = s;
    r
}

fn binomial(k: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (k - i) as f64 / (i + 1) as f64)
}

/// Kernel of (P̃_N)^k − (P̃_N^Ω)^k at x ∈ ℝ^d, y ∈ Ω. Expanding the k-th power gives
/// Σ_{j=0}^{k} (−1)^j C(k,j) [e^{τ_jΔ} − e^{τ_jΔ_Ω}](x,y) with τ_j = (k+3j)/N². The Ω-term
/// vanishes for x in the obstacle.
pub fn kernel_difference(n: f64, k: u32, x: &[f64], y: &[f64], ell_max: u32) -> Result<KernelSample> {
    if !(n > 0.0 && n.is_finite()) || k == 0 {
        return Err(invalid("need N > 0 and k ≥ 1"));
    }
    let d = x.len() as u32;
    if y.len() != x.len() {
        return Err(invalid("points must have the same dimension"));
    }
    let ry = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ry <= 1.0 {
        return Err(invalid("y must lie outside the obstacle"));
    }
    let rx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut value = 0.0;
    let mut err = 0.0;
    for j in 0..=k {
        let tau = (k + 3 * j) as f64 / (n * n);
        let c = binomial(k, j) * if j % 2 == 0 { 1.0 } else { -1.0 };
        let g = gauss_kernel(d, x, y, tau)?;
        let (omega, e) = if rx > 1.0 {
            let s = exterior_kernel(d, x, y, tau, ell_max)?;
            (s.value, s.err)
        } else {
            (0.0, 0.0)
        };
        value += c * (g - omega);
        err += c.abs() * e;
    }
    Ok(KernelSample { geometry: Geometry::Points { x: x.to_vec(), y: y.to_vec() }, t: 1.0 / (n * n), value, err })
}

/// ‖S_ℝ(f) − S_Ω(f)‖_{L^p(ℝ^d)} / ‖f/d(x)^s‖_{L^p(Ω)}, heat family with power k and the
/// default range. S_Ω is taken to vanish inside the obstacle.
pub fn sq_difference_ratio(f: &RadialFunction, s: f64, p: f64, k: u32) -> Result<NormReport> {
    sq_difference_ratio_with(f, s, p, k, DyadicRange::default(), &SpectralGrid::default())
}

pub fn sq_difference_ratio_with(
    f: &RadialFunction,
    s: f64,
    p: f64,
    k: u32,
    range: DyadicRange,
    grid: &SpectralGrid,
) -> Result<NormReport> {
    check_p(p)?;
    if !(s > 0.0) {
        return Err(invalid(format!("smoothness s must be positive, got {s}")));
    }
    let d = f.d();
    if f.support().lo < 1.0 {
        return Err(invalid("f must be supported in the exterior of the unit ball"));
    }
    let kind = ProjectorKind::heat(k);
    let whole = DomainSpec::whole(d)?;
    let ext = DomainSpec::exterior(d)?;
    let s_whole = square_function_with(f, s, kind, range, whole, grid)?.function;
    let s_ext = square_function_with(f, s, kind, range, ext, grid)?.function;
    let wg = s_whole.grid().expect("sampled").clone();
    let (wv, _) = s_whole.samples().unwrap();
    let diff: Vec<f64> = wg
        .nodes()
        .iter()
        .zip(wv)
        .map(|(&r, &a)| if r < 1.0 { a } else { a - s_ext.eval(r) })
        .collect();
    let diff = RadialFunction::sampled(d, f.ell(), wg, diff, None)?;
    let num = lp_norm_radial(&diff, p, &RadialMeasure::whole_space(d)?, &Weight::None)?;
    let den = lp_norm_radial(f, p, &RadialMeasure::exterior(d)?, &Weight::DistPower(s))?;
    let mut rep = NormReport::ratio("sq_difference_ratio", tagged(num, "square_function_difference", s), tagged(den, "hardy_weighted", s));
    rep.s = s;
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BernsteinReport {
    pub n: f64,
    /// ‖P̃_N f‖_q / (N^{d(1/p−1/q)} ‖f‖_p).
    pub lq_ratio: NormReport,
    /// ‖(−Δ)^{s/2} P_N f‖_p / (N^s ‖P_N f‖_p), bump family.
    pub derivative_ratio: NormReport,
}

pub fn bernstein_check(f: &RadialFunction, n: f64, p: f64, q: f64, s: f64, domain: DomainSpec) -> Result<BernsteinReport> {
    bernstein_check_with(f, n, p, q, s, domain, &SpectralGrid::default())
}

pub fn bernstein_check_with(
    f: &RadialFunction,
    n: f64,
    p: f64,
    q: f64,
    s: f64,
    domain: DomainSpec,
    grid: &SpectralGrid,
) -> Result<BernsteinReport> {
    check_p(p)?;
    if !(q > p) {
        return Err(invalid(format!("Bernstein needs p < q, got p = {p}, q = {q}")));
    }
    check_dyadic(n)?;
    let spec = forward(f, domain, grid)?;
    let d = domain.d as f64;

    let heat = spec.apply(&ProjectorKind::heat(1).multiplier(n)).inverse()?;
    let num = domain_norm(&heat, q, domain)?;
    let mut den = domain_norm(f, p, domain)?;
    let scale = n.powf(d * (1.0 / p - 1.0 / q));
    den.value *= scale;
    den.error *= scale;
    let lq_ratio = NormReport::ratio("bernstein_lq", num, den);

    let piece = spec.apply(&ProjectorKind::bump(1).multiplier(n));
    let derivative = piece.apply(&Multiplier::power(s)).inverse()?;
    let num = domain_norm(&derivative, p, domain)?;
    let mut den = domain_norm(&piece.inverse()?, p, domain)?;
    den.value *= n.powf(s);
    den.error *= n.powf(s);
    let mut derivative_ratio = NormReport::ratio("bernstein_derivative", num, den);
    derivative_ratio.s = s;
    Ok(BernsteinReport { n, lq_ratio, derivative_ratio })
}
