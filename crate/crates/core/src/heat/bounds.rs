//! Sampled check of the two-sided exterior heat-kernel bound
//!   K(x,y;t) ≈ [d(x)/(√t ∧ 2) ∧ 1]·[d(y)/(√t ∧ 2) ∧ 1]·t^{−d/2}·exp(−c|x−y|²/t),
//! with d(x) = |x| − 1, the obstacle diameter being 2.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{exterior_kernel_polar, gauss_from_dist2, halfspace_kernel, HalfSpace};
use crate::domain::{DomainSpec, OBSTACLE_DIAMETER};
use crate::error::{invalid, Result};
use crate::fit::{fit_lower, fit_upper, GaussianEnvelope, DEFAULT_RATE_RANGE};

/// Largest |x−y|²/t sampled; beyond it the kernel drops below the quadrature noise floor
/// of the angular sum.
const MAX_SCALED_DIST2: f64 = 40.0;

/// One evaluated geometry of the bound check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSample {
    pub r: f64,
    pub rprime: f64,
    pub cos_theta: f64,
    pub t: f64,
    pub exterior: f64,
    pub err: f64,
    pub halfspace: f64,
    pub gauss: f64,
    /// |x−y|²/t.
    pub z: f64,
    /// exterior / (boundary factors · t^{−d/2}).
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatBoundReport {
    pub d: u32,
    pub samples: Vec<BoundSample>,
    /// Samples breaking 0 ≤ half-space ≤ exterior ≤ Gaussian by more than the error estimate.
    pub ordering_violations: usize,
    pub upper: Option<GaussianEnvelope>,
    pub lower: Option<GaussianEnvelope>,
    /// C_upper / C_lower.
    pub constant_ratio: f64,
}

/// Boundary shape factor d(x)/(√t ∧ diam) ∧ 1.
pub fn boundary_factor(r: f64, t: f64) -> f64 {
    (DomainSpec::boundary_distance(r) / t.sqrt().min(OBSTACLE_DIAMETER)).min(1.0)
}

/// Deterministic geometries (r, r′, cos θ, t): radii in [1.01, 6] with extra weight near the
/// boundary, times log-uniform in [0.05, 8], and |x−y|²/t ≤ 40.
pub fn sample_geometries(n: usize, seed: u64) -> Vec<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let radius = |rng: &mut ChaCha8Rng| 1.0 + 0.01 * 500f64.powf(rng.gen::<f64>());
    while out.len() < n {
        let r = radius(&mut rng);
        let rp = radius(&mut rng);
        let c: f64 = rng.gen_range(-1.0..=1.0);
        let t = 0.05 * 160f64.powf(rng.gen::<f64>());
        let rho2 = r * r + rp * rp - 2.0 * r * rp * c;
        if rho2 / t <= MAX_SCALED_DIST2 {
            out.push((r, rp, c, t));
        }
    }
    out
}

/// Evaluates the exterior, half-space and Gaussian kernels on each geometry, counts ordering
/// violations and fits upper and lower Gaussian envelopes to the shape-normalized ratios.
pub fn verify_heat_bounds(d: u32, geometries: &[(f64, f64, f64, f64)], ell_max: u32) -> Result<HeatBoundReport> {
    DomainSpec::exterior(d)?;
    if geometries.is_empty() {
        return Err(invalid("no sample geometries"));
    }
    let samples: Vec<BoundSample> = geometries
        .par_iter()
        .map(|&(r, rp, c, t)| evaluate(d, r, rp, c, t, ell_max))
        .collect::<Result<_>>()?;
    let ordering_violations = samples
        .iter()
        .filter(|s| {
            let slack = s.err + 1e-12 * s.gauss;
            s.halfspace < 0.0 || s.halfspace > s.exterior + slack || s.exterior > s.gauss + slack || s.exterior < -s.err
        })
        .count();
    let z: Vec<f64> = samples.iter().map(|s| s.z).collect();
    let q: Vec<f64> = samples.iter().map(|s| s.ratio).collect();
    let upper = fit_upper(&z, &q, DEFAULT_RATE_RANGE);
    let lower = fit_lower(&z, &q, DEFAULT_RATE_RANGE);
    let constant_ratio = match (upper, lower) {
        (Some(u), Some(l)) => u.constant / l.constant,
        _ => f64::INFINITY,
    };
    Ok(HeatBoundReport { d, samples, ordering_violations, upper, lower, constant_ratio })
}

fn evaluate(d: u32, r: f64, rp: f64, c: f64, t: f64, ell_max: u32) -> Result<BoundSample> {
    let ext = exterior_kernel_polar(d, r, rp, c, t, ell_max)?;
    let s = (1.0 - c * c).max(0.0).sqrt();
    let mut x = vec![0.0; d as usize];
    let mut y = vec![0.0; d as usize];
    x[0] = r * c;
    x[1] = r * s;
    y[0] = rp;
    let half = halfspace_kernel(d, &x, &y, t, &HalfSpace::supporting(&y)?)?;
    let rho2 = r * r + rp * rp - 2.0 * r * rp * c;
    let gauss = gauss_from_dist2(d, rho2, t);
    let shape = boundary_factor(r, t) * boundary_factor(rp, t) * t.powf(-(d as f64) / 2.0);
    Ok(BoundSample {
        r,
        rprime: rp,
        cos_theta: c,
        t,
        exterior: ext.value,
        err: ext.err,
        halfspace: half,
        gauss,
        z: rho2 / t,
        ratio: ext.value / shape,
    })
}
