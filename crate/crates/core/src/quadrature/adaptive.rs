//! Globally adaptive Gauss–Kronrod (10/21) integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::rules::{WG10, WGK21, XGK21};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-8;
pub const DEFAULT_BUDGET: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

/// Which endpoints carry an integrable singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Singular {
    #[default]
    None,
    Lower,
    Upper,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of integrand evaluations.
    pub budget: usize,
    pub singular: Singular,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            abs_tol: 0.0,
            budget: DEFAULT_BUDGET,
            singular: Singular::None,
        }
    }
}

impl QuadOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }

    pub fn abs(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn singular(mut self, singular: Singular) -> Self {
        self.singular = singular;
        self
    }
}

pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<IntegralResult> {
    integrate_with(f, a, b, &QuadOptions::with_tol(tol))
}

pub fn integrate_with(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<IntegralResult> {
    integrate_breakpoints(f, &[a, b], opts)
}

/// Integrates over [points[0], points[last]] with the interior points as forced breaks.
/// Singularity hints apply to the outermost endpoints.
pub fn integrate_breakpoints(
    f: impl Fn(f64) -> f64,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<IntegralResult> {
    let (res, converged) = integrate_breakpoints_lenient(f, points, opts)?;
    if converged {
        Ok(res)
    } else {
        Err(Error::NonConvergence {
            what: "adaptive quadrature".into(),
            estimate: res.value,
            error: res.abs_error_estimate,
        })
    }
}

/// Like [`integrate_breakpoints`] but returns the best estimate and a convergence flag
/// instead of failing when the budget runs out.
pub fn integrate_breakpoints_lenient(
    f: impl Fn(f64) -> f64,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<(IntegralResult, bool)> {
    let mut g = |x: f64, out: &mut [f64]| out[0] = f(x);
    let (res, converged) = adaptive_vec(&mut g, 1, points, opts)?;
    Ok((
        IntegralResult {
            value: res.values[0],
            abs_error_estimate: res.errors[0],
            evaluations: res.evaluations,
        },
        converged,
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecIntegral {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
}

/// Integrates a vector-valued integrand; intervals are refined by their worst component
/// and convergence is judged against the largest component.
pub fn integrate_vec(
    mut f: impl FnMut(f64, &mut [f64]),
    dim: usize,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<(VecIntegral, bool)> {
    adaptive_vec(&mut f, dim, points, opts)
}

struct Segment {
    piece: usize,
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
    resabs: f64,
    worst: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.worst == other.worst
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.worst.total_cmp(&other.worst)
    }
}

/// Change of variables removing endpoint power singularities: x = a + u² near a
/// and x = b − u² near b. Returns the mapped integrand's domain and map.
#[derive(Clone, Copy)]
enum Map {
    Identity,
    Lower { a: f64 },
    Upper { b: f64 },
}

impl Map {
    fn apply(self, u: f64) -> (f64, f64) {
        match self {
            Map::Identity => (u, 1.0),
            Map::Lower { a } => (a + u * u, 2.0 * u),
            Map::Upper { b } => (b - u * u, 2.0 * u),
        }
    }
}

fn adaptive_vec(
    f: &mut dyn FnMut(f64, &mut [f64]),
    dim: usize,
    points: &[f64],
    opts: &QuadOptions,
) -> Result<(VecIntegral, bool)> {
    if points.len() < 2 {
        return Err(invalid("need at least two integration points"));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(invalid("integration limits must be finite"));
    }
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("integration points must be non-decreasing"));
    }
    if !(opts.rel_tol >= 0.0 && opts.abs_tol >= 0.0) {
        return Err(invalid("tolerances must be non-negative"));
    }

    // Each initial piece gets its own variable map.
    let mut pieces: Vec<(Map, f64, f64)> = Vec::new();
    let last = points.len() - 2;
    for (i, w) in points.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let lower = i == 0 && matches!(opts.singular, Singular::Lower | Singular::Both);
        let upper = i == last && matches!(opts.singular, Singular::Upper | Singular::Both);
        match (lower, upper) {
            (true, true) => {
                let m = 0.5 * (a + b);
                pieces.push((Map::Lower { a }, 0.0, (m - a).sqrt()));
                pieces.push((Map::Upper { b }, 0.0, (b - m).sqrt()));
            }
            (true, false) => pieces.push((Map::Lower { a }, 0.0, (b - a).sqrt())),
            (false, true) => pieces.push((Map::Upper { b }, 0.0, (b - a).sqrt())),
            (false, false) => pieces.push((Map::Identity, a, b)),
        }
    }

    let mut evaluations = 0usize;
    let mut heap: BinaryHeap<Segment> = BinaryHeap::new();
    let mut buf = vec![0.0; dim * 21];
    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    let mut resabs = 0.0;
    for (piece, &(map, a, b)) in pieces.iter().enumerate() {
        let seg = gk21(f, map, piece, a, b, dim, &mut buf);
        seg.accumulate(&mut values, &mut errors, &mut resabs, 1.0);
        heap.push(seg);
        evaluations += 21;
    }

    loop {
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = errors.iter().fold(0.0f64, |m, v| m.max(*v));
        let target = (opts.rel_tol * scale).max(opts.abs_tol);
        let roundoff = 100.0 * f64::EPSILON * resabs;
        let converged = err <= target || err <= roundoff || heap.is_empty();
        if converged || evaluations + 42 > opts.budget {
            // Re-sum from scratch so the running totals carry no drift.
            let mut values = vec![0.0; dim];
            let mut errors = vec![0.0; dim];
            let mut resabs = 0.0;
            let mut segs: Vec<&Segment> = heap.iter().collect();
            segs.sort_by(|x, y| (x.piece, x.a).partial_cmp(&(y.piece, y.a)).unwrap());
            for s in segs {
                s.accumulate(&mut values, &mut errors, &mut resabs, 1.0);
            }
            return Ok((VecIntegral { values, errors, evaluations }, converged));
        }

        let seg = heap.pop().expect("non-empty heap");
        let map = pieces[seg.piece].0;
        let mid = 0.5 * (seg.a + seg.b);
        if seg.worst == 0.0 || mid <= seg.a || mid >= seg.b {
            // Unsplittable in floating point: keep its contribution, stop refining it.
            let mut frozen = seg;
            frozen.worst = -1.0;
            heap.push(frozen);
            if heap.peek().is_none_or(|s| s.worst < 0.0) {
                return Ok((VecIntegral { values, errors, evaluations }, false));
            }
            continue;
        }
        seg.accumulate(&mut values, &mut errors, &mut resabs, -1.0);
        for (lo, hi) in [(seg.a, mid), (mid, seg.b)] {
            let child = gk21(f, map, seg.piece, lo, hi, dim, &mut buf);
            child.accumulate(&mut values, &mut errors, &mut resabs, 1.0);
            heap.push(child);
        }
        evaluations += 42;
    }
}

impl Segment {
    fn accumulate(&self, values: &mut [f64], errors: &mut [f64], resabs: &mut f64, sign: f64) {
        for k in 0..values.len() {
            values[k] += sign * self.values[k];
            errors[k] += sign * self.errors[k];
        }
        *resabs += sign * self.resabs;
    }
}

fn gk21(
    f: &mut dyn FnMut(f64, &mut [f64]),
    map: Map,
    piece: usize,
    a: f64,
    b: f64,
    dim: usize,
    buf: &mut [f64],
) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // Node order: center, then ± pairs for XGK21[0..10].
    let mut eval = |slot: usize, u: f64, buf: &mut [f64]| {
        let (x, jac) = map.apply(u);
        let out = &mut buf[slot * dim..(slot + 1) * dim];
        f(x, out);
        // Non-finite samples (e.g. an underflowing normalization) contribute nothing.
        for v in out.iter_mut() {
            *v = if v.is_finite() { *v * jac } else { 0.0 };
        }
    };
    eval(0, center, buf);
    for j in 0..10 {
        let dx = half * XGK21[j];
        eval(1 + 2 * j, center - dx, buf);
        eval(2 + 2 * j, center + dx, buf);
    }

    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    let mut resabs_total = 0.0;
    let mut worst = 0.0f64;
    for k in 0..dim {
        let fc = buf[k];
        let mut kron = WGK21[10] * fc;
        let mut gauss = 0.0;
        let mut resabs = WGK21[10] * fc.abs();
        for j in 0..10 {
            let f1 = buf[(1 + 2 * j) * dim + k];
            let f2 = buf[(2 + 2 * j) * dim + k];
            kron += WGK21[j] * (f1 + f2);
            resabs += WGK21[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += WG10[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * kron;
        let mut resasc = WGK21[10] * (fc - mean).abs();
        for j in 0..10 {
            let f1 = buf[(1 + 2 * j) * dim + k];
            let f2 = buf[(2 + 2 * j) * dim + k];
            resasc += WGK21[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let h = half.abs();
        let (kron, gauss, resabs, resasc) = (kron * half, gauss * half, resabs * h, resasc * h);
        let mut err = (kron - gauss).abs();
        if resasc != 0.0 && err != 0.0 {
            err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
        }
        let floor = 50.0 * f64::EPSILON * resabs;
        if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
            err = err.max(floor);
        }
        values[k] = kron;
        errors[k] = err;
        resabs_total += resabs;
        worst = worst.max(err);
    }
    Segment { piece, a, b, values, errors, resabs: resabs_total, worst }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn elementary_integrals() {
        let r = integrate(|x| x * x, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
        let r = integrate(f64::sin, 0.0, PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_square_root_with_singular_hint() {
        let opts = QuadOptions::with_tol(1e-10).singular(Singular::Lower);
        let r = integrate_with(|x| x.powf(-0.5), 0.0, 1.0, &opts).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8);
        let opts = QuadOptions::with_tol(1e-10).singular(Singular::Both);
        let r = integrate_with(|x| 1.0 / (x * (1.0 - x)).sqrt(), 0.0, 1.0, &opts).unwrap();
        assert!((r.value - PI).abs() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let opts = QuadOptions::with_tol(1e-14).budget(100);
        match integrate_with(|x| (1.0 / x).sin(), 1e-3, 1.0, &opts) {
            Err(Error::NonConvergence { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn vector_integrand() {
        let (r, ok) = integrate_vec(
            |x, out| {
                out[0] = x.cos();
                out[1] = x.exp();
            },
            2,
            &[0.0, 1.0, 2.0],
            &QuadOptions::with_tol(1e-12),
        )
        .unwrap();
        assert!(ok);
        assert!((r.values[0] - 2f64.sin()).abs() < 1e-12);
        assert!((r.values[1] - (2f64.exp() - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn bad_limits_rejected() {
        assert!(integrate(|x| x, 1.0, 0.0, 1e-8).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-8).is_err());
    }

    #[test]
    fn zero_integrand_converges() {
        let r = integrate(|_| 0.0, 0.0, 1.0, 1e-8).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.evaluations, 21);
    }
}
