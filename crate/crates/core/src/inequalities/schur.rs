//! Weighted Schur test for rotation-invariant kernels on radial regions of ℝ^d.
//!
//! For a center point at radius a the integral over the other variable z is written in
//! polar coordinates around the center, z = center + ρω, and the angle is traded for
//! m = |z|:
//!
//!   ∫ F dz = ω_{d−2} ∫ ρ^{d−1} ∫_{|a−ρ|}^{a+ρ} F(m, ρ) sin^{d−3}φ · m/(aρ) dm dρ,
//!
//! with cos φ = (m² − a² − ρ²)/(2aρ). The ρ-integral runs over dyadic shells and is
//! completed at both ends by geometric extrapolation of the outermost shells.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::weights::{boundary_distance, Pair, WeightSpec};
use crate::error::{invalid, Error, Result};
use crate::quadrature::rules::{gl16, gl16_composite};
use crate::quadrature::{integrate_breakpoints_lenient, sphere_area, QuadOptions, Singular};
use crate::radial::Profile;

/// Points with inner < |z| < outer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Space {
    pub inner: f64,
    pub outer: f64,
}

impl Space {
    pub fn exterior() -> Self {
        Self { inner: 1.0, outer: f64::INFINITY }
    }

    pub fn whole() -> Self {
        Self { inner: 0.0, outer: f64::INFINITY }
    }

    pub fn annulus(inner: f64, outer: f64) -> Result<Self> {
        if !(inner >= 0.0 && inner < outer) {
            return Err(invalid("annulus needs 0 ≤ inner < outer"));
        }
        Ok(Self { inner, outer })
    }

    pub fn contains(&self, r: f64) -> bool {
        r > self.inner && r < self.outer
    }
}

pub type KernelFn = Arc<dyn Fn(Pair) -> f64 + Send + Sync>;

/// A non-negative kernel K(x, y) for x ∈ X, y ∈ Y.
#[derive(Clone)]
pub struct SchurKernel {
    pub name: String,
    pub x_space: Space,
    pub y_space: Space,
    k: KernelFn,
}

impl std::fmt::Debug for SchurKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SchurKernel({}, X = {:?}, Y = {:?})", self.name, self.x_space, self.y_space)
    }
}

impl SchurKernel {
    pub fn new(name: impl Into<String>, x_space: Space, y_space: Space, k: impl Fn(Pair) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), x_space, y_space, k: Arc::new(k) }
    }

    pub fn eval(&self, q: Pair) -> f64 {
        (self.k)(q)
    }
}

/// 1/(|x|^s |x−y|^{d−s}) on d(x), d(y) ≥ diam, i.e. |x|, |y| > 3.
pub fn far_region_kernel(d: u32, s: f64) -> SchurKernel {
    let far = Space { inner: 3.0, outer: f64::INFINITY };
    let e = d as f64 - s;
    SchurKernel::new(format!("far-region 1/(|x|^{s}|x-y|^{e})"), far, far, move |q: Pair| {
        q.x.powf(-s) * q.dist.powf(-e)
    })
}

/// d(y)^s [d(x)² + d(y)² + |x−y|²]^{−(d+s)/2} for x ∈ ℝ^d, y ∈ Ω, the majorant of the
/// summed square-function kernel differences. Inside the obstacle d(x) = 1 − |x|.
pub fn difference_kernel(d: u32, s: f64) -> SchurKernel {
    let e = -(d as f64 + s) / 2.0;
    SchurKernel::new(format!("square-function difference, s = {s}"), Space::whole(), Space::exterior(), move |q: Pair| {
        let (dx, dy) = (boundary_distance(q.x), boundary_distance(q.y));
        dy.powf(s) * (dx * dx + dy * dy + q.dist * q.dist).powf(e)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    /// C₀(x) = ∫_Y w^{1/p} K dν(y).
    Rows,
    /// C₁(y) = ∫_X w^{−1/p′} K dμ(x).
    Columns,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideIntegral {
    pub center: f64,
    pub value: f64,
    /// The outermost ρ-shells did not decay; `value` is the integral up to the cutoff.
    pub tail_divergent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchurOptions {
    /// Sup grids 0..levels; each level doubles the grid density and extends the ρ-cutoff of
    /// every integral by a factor 4.
    pub levels: u32,
    /// Also widen the sup grid by an octave at both ends per level, which exposes sups
    /// attained at the ends of the radial range.
    pub extend_range: bool,
    /// Relative change of both sups between the last two levels accepted as converged.
    pub tol: f64,
    pub inner_tol: f64,
}

impl Default for SchurOptions {
    fn default() -> Self {
        Self { levels: 2, extend_range: false, tol: 0.02, inner_tol: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurLevel {
    pub level: u32,
    pub points: usize,
    pub c0: f64,
    pub c0_argmax: f64,
    pub c1: f64,
    pub c1_argmax: f64,
    pub tail_divergent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchurReport {
    pub kernel: String,
    pub weight: WeightSpec,
    pub d: u32,
    pub p: f64,
    pub c0: f64,
    pub c1: f64,
    /// C₀^{1/p′} C₁^{1/p}.
    pub bound: f64,
    pub c0_argmax: f64,
    pub c1_argmax: f64,
    pub levels: Vec<SchurLevel>,
    pub converged: bool,
}

impl SchurReport {
    /// Whether C₀ or C₁ increased by more than the relative amount `min_rel` at every
    /// refinement.
    pub fn grows_monotonically(&self, min_rel: f64) -> bool {
        let grows = |f: fn(&SchurLevel) -> f64| {
            self.levels.len() >= 2 && self.levels.windows(2).all(|v| f(&v[1]) > (1.0 + min_rel) * f(&v[0]))
        };
        grows(|l| l.c0) || grows(|l| l.c1)
    }
}

fn check(p: f64, d: u32) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("exponent p must lie in (1, ∞), got {p}")));
    }
    if d < 3 {
        return Err(invalid(format!("dimension must be at least 3, got {d}")));
    }
    Ok(())
}

/// Centers of the sup grid at a refinement level: radii 1 ± δ with δ log-spaced over
/// [2^{−12}, 2^6] (outside) and [2^{−12}, 1/2] (inside), 2^{L+1} per octave. With `extend`
/// the range is [2^{−12−L}, 2^{6+L}]. Other finite edges e of the region add e ± δ.
pub fn sup_grid(space: Space, level: u32, extend: bool) -> Vec<f64> {
    let per_octave = 2usize << level;
    let widen = if extend { level as i32 } else { 0 };
    let lo = -12 - widen;
    let hi = 6 + widen;
    let mut pts = Vec::new();
    let steps = (hi - lo) as usize * per_octave;
    // Finite edges of the region other than the unit sphere get the same clustering.
    let edges: Vec<f64> =
        [space.inner, space.outer].into_iter().filter(|&e| e > 0.0 && e.is_finite() && e != 1.0).collect();
    for i in 0..=steps {
        let delta = 2f64.powf(lo as f64 + i as f64 / per_octave as f64);
        pts.push(1.0 + delta);
        if delta <= 0.5 {
            pts.push(1.0 - delta);
        }
        for &e in &edges {
            pts.push(e + delta);
            pts.push(e - delta);
        }
    }
    pts.retain(|&a| space.contains(a));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

struct Integrand<'a> {
    kernel: &'a SchurKernel,
    weight: &'a WeightSpec,
    p: f64,
    d: u32,
    side: Side,
    center: f64,
    opts: QuadOptions,
}

impl Integrand<'_> {
    fn space(&self) -> Space {
        match self.side {
            Side::Rows => self.kernel.y_space,
            Side::Columns => self.kernel.x_space,
        }
    }

    fn point(&self, m: f64, rho: f64) -> f64 {
        let a = self.center;
        let (q, power) = match self.side {
            Side::Rows => (Pair { x: a, y: m, dist: rho }, 1.0 / self.p),
            Side::Columns => (Pair { x: m, y: a, dist: rho }, -(self.p - 1.0) / self.p),
        };
        let k = self.kernel.eval(q);
        if k == 0.0 {
            return 0.0;
        }
        let w = self.weight.eval(q);
        let v = w.powf(power) * k;
        let jac = if self.d == 3 {
            1.0
        } else {
            let c = (m * m - a * a - rho * rho) / (2.0 * a * rho);
            (1.0 - c * c).max(0.0).sqrt().powi(self.d as i32 - 3)
        };
        v * jac * m / (a * rho)
    }

    /// ∫ over the sphere |z − center| = ρ, without the ω_{d−2} ρ^{d−1} factor.
    fn sphere(&self, rho: f64) -> f64 {
        let a = self.center;
        let sp = self.space();
        let lo = (a - rho).abs().max(sp.inner);
        let hi = (a + rho).min(sp.outer);
        if !(lo < hi) {
            return 0.0;
        }
        let mut pts = vec![lo];
        let da = boundary_distance(a);
        for b in [1.0, 3.0, a, 1.0 + rho, 1.0 - rho, 1.0 + 0.5 * rho, 1.0 + 2.0 * rho, 1.0 + da, 1.0 - da] {
            if b > lo && b < hi {
                pts.push(b);
            }
        }
        pts.push(hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1.0));
        let opts = self.opts.clone().singular(Singular::Both);
        pts.windows(2)
            .map(|w| {
                integrate_breakpoints_lenient(|m| self.point(m, rho), &[w[0], w[1]], &opts)
                    .map(|(r, _)| r.value)
                    .unwrap_or(f64::NAN)
            })
            .sum()
    }
}

/// C₀ or C₁ at one center radius; `level` extends the outer ρ-cutoff by a factor 4 per level.
pub fn schur_integral(
    kernel: &SchurKernel,
    weight: &WeightSpec,
    p: f64,
    d: u32,
    side: Side,
    center: f64,
    level: u32,
    inner_tol: f64,
) -> Result<SideIntegral> {
    check(p, d)?;
    let integrand = Integrand {
        kernel,
        weight,
        p,
        d,
        side,
        center,
        opts: QuadOptions::with_tol(inner_tol).budget(20_000),
    };
    let a = center;
    let da = boundary_distance(a).max(1e-300);
    let sp = integrand.space();
    let rho_min = da.min(1.0) * 2f64.powi(-16);
    let mut specials = vec![0.5 * da, da, 2.0 * da, a, 2.0 * a, 2.0, 3.0, a + 1.0, a + 3.0, (a - 3.0).abs()];
    for b in [sp.inner, sp.outer] {
        if b.is_finite() {
            specials.push((a - b).abs());
            specials.push(a + b);
        }
    }
    let top = specials.iter().copied().filter(|v| v.is_finite()).fold(a.max(1.0), f64::max);
    let rho_max = top * 2f64.powi(12 + 2 * level as i32);
    let mut breaks: Vec<f64> = Vec::new();
    let mut r = rho_min;
    while r <= rho_max {
        breaks.push(r);
        r *= 2.0;
    }
    let dyadic_top = *breaks.last().expect("non-empty");
    breaks.extend(specials.into_iter().filter(|&v| v > 4.0 * rho_min && v < dyadic_top / 4.0));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * y.abs());

    let omega = sphere_area(d - 1);
    let (x, w) = gl16();
    let shells: Vec<f64> = breaks
        .windows(2)
        .map(|iv| {
            let (lo, hi) = (iv[0], iv[1]);
            let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
            x.iter()
                .zip(w)
                .map(|(xi, wi)| {
                    let rho = mid + half * xi;
                    wi * half * rho.powi(d as i32 - 1) * integrand.sphere(rho)
                })
                .sum::<f64>()
        })
        .collect();
    if shells.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonConvergence {
            what: format!("Schur integral at radius {a}"),
            estimate: f64::NAN,
            error: f64::INFINITY,
        });
    }
    let mut total: f64 = shells.iter().sum();
    // Pure dyadic shells at both ends: continue them geometrically.
    let n = shells.len();
    let (i0, i1) = (shells[0], shells[1]);
    if i1 > 0.0 && i0 < i1 {
        let q = i0 / i1;
        total += i0 * q / (1.0 - q);
    }
    let (last, prev) = (shells[n - 1], shells[n - 2]);
    let mut tail_divergent = false;
    if last > 0.0 && prev > 0.0 {
        let q = last / prev;
        if q < 1.0 {
            total += last * q / (1.0 - q);
        } else {
            tail_divergent = true;
        }
    }
    Ok(SideIntegral { center: a, value: omega * total, tail_divergent })
}

fn sup_over(
    kernel: &SchurKernel,
    weight: &WeightSpec,
    p: f64,
    d: u32,
    side: Side,
    level: u32,
    opts: &SchurOptions,
) -> Result<(f64, f64, bool, usize)> {
    let space = match side {
        Side::Rows => kernel.x_space,
        Side::Columns => kernel.y_space,
    };
    let centers = sup_grid(space, level, opts.extend_range);
    if centers.is_empty() {
        return Err(invalid("the sup grid does not meet the region"));
    }
    let vals: Vec<SideIntegral> = centers
        .par_iter()
        .map(|&c| schur_integral(kernel, weight, p, d, side, c, level, opts.inner_tol))
        .collect::<Result<_>>()?;
    let best = vals.iter().fold(vals[0], |b, v| if v.value > b.value { *v } else { b });
    Ok((best.value, best.center, vals.iter().any(|v| v.tail_divergent), centers.len()))
}

/// Sups of C₀ and C₁ on successively refined grids. Never fails for lack of stabilization;
/// see [`SchurReport::converged`].
pub fn schur_sweep(kernel: &SchurKernel, weight: &WeightSpec, p: f64, d: u32, opts: &SchurOptions) -> Result<SchurReport> {
    check(p, d)?;
    if opts.levels < 1 {
        return Err(invalid("need at least one refinement level"));
    }
    let mut levels = Vec::new();
    for level in 0..opts.levels {
        let (c0, c0_argmax, t0, n0) = sup_over(kernel, weight, p, d, Side::Rows, level, opts)?;
        let (c1, c1_argmax, t1, n1) = sup_over(kernel, weight, p, d, Side::Columns, level, opts)?;
        levels.push(SchurLevel { level, points: n0 + n1, c0, c0_argmax, c1, c1_argmax, tail_divergent: t0 || t1 });
    }
    let last = levels.last().expect("levels").clone();
    let converged = !last.tail_divergent
        && levels.len() >= 2
        && {
            let prev = &levels[levels.len() - 2];
            let rel = |a: f64, b: f64| (a - b).abs() <= opts.tol * a.abs().max(b.abs());
            rel(last.c0, prev.c0) && rel(last.c1, prev.c1)
        };
    let pp = p / (p - 1.0);
    Ok(SchurReport {
        kernel: kernel.name.clone(),
        weight: *weight,
        d,
        p,
        c0: last.c0,
        c1: last.c1,
        bound: last.c0.powf(1.0 / pp) * last.c1.powf(1.0 / p),
        c0_argmax: last.c0_argmax,
        c1_argmax: last.c1_argmax,
        levels,
        converged,
    })
}

/// [`schur_sweep`] with default options; a sup that does not stabilize is an error carrying
/// the last bound.
pub fn schur_bound(kernel: &SchurKernel, weight: &WeightSpec, p: f64, d: u32) -> Result<SchurReport> {
    let rep = schur_sweep(kernel, weight, p, d, &SchurOptions::default())?;
    if rep.converged {
        Ok(rep)
    } else {
        let trend: Vec<String> = rep.levels.iter().map(|l| format!("({:.4e}, {:.4e})", l.c0, l.c1)).collect();
        Err(Error::NonConvergence {
            what: format!("Schur sups of {} under refinement {}", rep.kernel, trend.join(" → ")),
            estimate: rep.bound,
            error: f64::INFINITY,
        })
    }
}

/// Finite-rank kernel Σ a_i(|x|) b_i(|y|) on a bounded annulus, whose operator norm on
/// radial functions can be probed exactly.
#[derive(Clone)]
pub struct ToyKernel {
    pub terms: Vec<(Profile, Profile)>,
    pub space: Space,
}

const TOY_PANELS: usize = 64;

impl ToyKernel {
    pub fn new(terms: Vec<(Profile, Profile)>, space: Space) -> Result<Self> {
        if terms.is_empty() || !space.outer.is_finite() {
            return Err(invalid("toy kernels need at least one term and a bounded annulus"));
        }
        Ok(Self { terms, space })
    }

    pub fn kernel(&self) -> SchurKernel {
        let terms = self.terms.clone();
        SchurKernel::new(format!("rank-{} toy", terms.len()), self.space, self.space, move |q: Pair| {
            terms.iter().map(|(a, b)| a(q.x) * b(q.y)).sum()
        })
    }

    fn radial(&self, d: u32, g: impl Fn(f64) -> f64) -> f64 {
        sphere_area(d) * gl16_composite(|r| g(r) * r.powi(d as i32 - 1), self.space.inner, self.space.outer, TOY_PANELS)
    }

    /// Largest ‖Tf‖_p/‖f‖_p over `samples` random non-negative radial step functions.
    pub fn random_lower_bound(&self, d: u32, p: f64, samples: usize, seed: u64) -> Result<f64> {
        check(p, d)?;
        const SHELLS: usize = 12;
        let (lo, hi) = (self.space.inner, self.space.outer);
        let h = (hi - lo) / SHELLS as f64;
        let shell = |j: usize| (lo + j as f64 * h, lo + (j + 1) as f64 * h);
        let omega = sphere_area(d);
        let vol: Vec<f64> = (0..SHELLS)
            .map(|j| {
                let (a, b) = shell(j);
                omega * (b.powi(d as i32) - a.powi(d as i32)) / d as f64
            })
            .collect();
        let moments: Vec<Vec<f64>> = self
            .terms
            .iter()
            .map(|(_, b)| {
                (0..SHELLS)
                    .map(|j| {
                        let (a, c) = shell(j);
                        omega * gl16_composite(|r| b(r) * r.powi(d as i32 - 1), a, c, 4)
                    })
                    .collect()
            })
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best: f64 = 0.0;
        for _ in 0..samples {
            let sharp = rng.gen_range(1.0..6.0);
            let v: Vec<f64> = (0..SHELLS).map(|_| rng.gen::<f64>().powf(sharp)).collect();
            let fp: f64 = v.iter().zip(&vol).map(|(x, m)| x.powf(p) * m).sum::<f64>().powf(1.0 / p);
            let c: Vec<f64> = moments.iter().map(|m| m.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
            let tf = self
                .radial(d, |r| {
                    self.terms.iter().zip(&c).map(|((a, _), ci)| a(r) * ci).sum::<f64>().abs().powf(p)
                })
                .powf(1.0 / p);
            if fp > 0.0 {
                best = best.max(tf / fp);
            }
        }
        Ok(best)
    }

    /// ‖a‖_{L^p} ‖b‖_{L^{p′}}, the exact norm of a rank-one kernel.
    pub fn rank_one_norm(&self, d: u32, p: f64) -> Result<f64> {
        if self.terms.len() != 1 {
            return Err(invalid("exact norm is only available for rank one"));
        }
        check(p, d)?;
        let pp = p / (p - 1.0);
        let (a, b) = &self.terms[0];
        let na = self.radial(d, |r| a(r).abs().powf(p)).powf(1.0 / p);
        let nb = self.radial(d, |r| b(r).abs().powf(pp)).powf(1.0 / pp);
        Ok(na * nb)
    }

    /// ω_{d−1} ∫ g r^{d−1} dr over the annulus.
    pub fn integral(&self, d: u32, g: impl Fn(f64) -> f64) -> f64 {
        self.radial(d, g)
    }
}
