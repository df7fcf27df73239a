//! Crank–Nicolson oracle for the radial heat equation
//!   ∂_t u = ∂_r²u + ((d−1)/r) ∂_r u − ℓ(ℓ+d−2)/r² u,
//! with u = 0 at the obstacle (or regularity at r = 0) and at a far radius R_∞.
//!
//! The spatial operator is the finite-volume form (1/V_i)[F_{i+½} − F_{i−½}] with fluxes
//! F = r^{d−1} ∂_r u and cell volumes V_i = ∫ r^{d−1} dr, so the discrete mass Σ V_i u_i
//! changes only through the boundary fluxes. The first two steps are replaced by four
//! implicit Euler half-steps, which damps the stiff modes Crank–Nicolson leaves undamped.

use std::sync::Arc;

use crate::domain::{DomainKind, DomainSpec};
use crate::error::{invalid, Error, Result};
use crate::radial::{RadialFunction, Support};

#[derive(Debug, Clone, PartialEq)]
pub struct CnOptions {
    /// Radial mesh width.
    pub dr: f64,
    /// Number of time steps.
    pub steps: usize,
    /// Overrides the default far radius max(20, support end + 10√t).
    pub r_far: Option<f64>,
    /// Largest allowed (unknowns × steps).
    pub max_work: usize,
}

impl Default for CnOptions {
    fn default() -> Self {
        Self { dr: 5e-4, steps: 2000, r_far: None, max_work: 2_000_000_000 }
    }
}

/// Nodal solution on r_i = r0 + i·dr, i = 0..=N.
#[derive(Debug, Clone, PartialEq)]
pub struct CnSolution {
    pub d: u32,
    pub ell: u32,
    pub r0: f64,
    pub dr: f64,
    pub values: Vec<f64>,
    /// Σ V_i u_i after each step, starting with the initial data.
    pub masses: Vec<f64>,
}

impl CnSolution {
    /// Four-point Lagrange interpolation; zero outside the mesh.
    pub fn eval(&self, r: f64) -> f64 {
        let n = self.values.len();
        let x = (r - self.r0) / self.dr;
        if !(x >= 0.0 && x <= (n - 1) as f64) {
            return 0.0;
        }
        let i = (x.floor() as usize).clamp(1, n.saturating_sub(3).max(1));
        let i0 = i - 1;
        let mut acc = 0.0;
        for a in 0..4 {
            let ia = i0 + a;
            if ia >= n {
                continue;
            }
            let mut w = 1.0;
            for b in 0..4 {
                if a != b {
                    w *= (x - (i0 + b) as f64) / (a as f64 - b as f64);
                }
            }
            acc += w * self.values[ia];
        }
        acc
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn to_radial(&self) -> Result<RadialFunction> {
        let sol = Arc::new(self.clone());
        let hi = self.r0 + (self.values.len() - 1) as f64 * self.dr;
        RadialFunction::analytic(self.d, self.ell, move |r| sol.eval(r), Support::compact(self.r0, hi))
    }
}

/// e^{tΔ} f by Crank–Nicolson with default options.
pub fn pde_oracle(f: &RadialFunction, t: f64, domain: DomainSpec) -> Result<RadialFunction> {
    pde_oracle_with(f, t, domain, &CnOptions::default())?.to_radial()
}

pub fn pde_oracle_with(f: &RadialFunction, t: f64, domain: DomainSpec, opts: &CnOptions) -> Result<CnSolution> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("time must be non-negative, got {t}")));
    }
    if f.d() != domain.d {
        return Err(invalid("function and domain disagree on the dimension"));
    }
    if f.is_complex() {
        return Err(invalid("the Crank–Nicolson oracle handles real data"));
    }
    let r0 = match domain.kind {
        DomainKind::ExteriorBall => 1.0,
        DomainKind::WholeSpace => 0.0,
        DomainKind::HalfSpace => return Err(invalid("radial evolution needs the whole space or the exterior ball")),
    };
    let support = f.support();
    if !(opts.dr > 0.0 && opts.steps >= 2) {
        return Err(invalid("mesh width must be positive and at least two steps are needed"));
    }
    let r_far = opts.r_far.unwrap_or_else(|| 20f64.max(support.hi + 10.0 * t.sqrt()));
    if r_far <= r0 + 4.0 * opts.dr {
        return Err(invalid("far radius too close to the inner boundary"));
    }
    let n = ((r_far - r0) / opts.dr).ceil() as usize;
    let h = (r_far - r0) / n as f64;
    if (n + 1).saturating_mul(opts.steps) > opts.max_work {
        return Err(Error::NonConvergence {
            what: format!("Crank–Nicolson oracle ({} unknowns × {} steps over budget)", n + 1, opts.steps),
            estimate: f64::NAN,
            error: f64::NAN,
        });
    }

    let d = domain.d as i32;
    let ell = f.ell();
    let centrifugal = (ell * (ell + domain.d - 2)) as f64;
    let node = |i: usize| r0 + i as f64 * h;
    // Regularity at r = 0 is only a Neumann-type condition for ℓ = 0.
    let free_origin = r0 == 0.0 && ell == 0;
    let first = if free_origin { 0 } else { 1 };

    let mut lower = vec![0.0; n + 1];
    let mut diag = vec![0.0; n + 1];
    let mut upper = vec![0.0; n + 1];
    let mut volume = vec![0.0; n + 1];
    for i in first..n {
        let ri = node(i);
        let left = if i == 0 { 0.0 } else { ri - 0.5 * h };
        let right = ri + 0.5 * h;
        let v = (right.powi(d) - left.powi(d)) / d as f64;
        let fl = if i == 0 { 0.0 } else { left.powi(d - 1) / h };
        let fr = right.powi(d - 1) / h;
        volume[i] = v;
        lower[i] = fl / v;
        upper[i] = fr / v;
        diag[i] = -(fl + fr) / v - if ri > 0.0 { centrifugal / (ri * ri) } else { 0.0 };
    }

    let (mut u, _) = f.sample_at(&(0..=n).map(node).collect::<Vec<_>>());
    u[n] = 0.0;
    if !free_origin {
        u[0] = 0.0;
    }
    let mass = |u: &[f64]| (first..n).map(|i| volume[i] * u[i]).sum::<f64>();
    let mut masses = vec![mass(&u)];

    if t > 0.0 {
        let k = t / opts.steps as f64;
        let mut schedule = vec![(0.5 * k, 1.0); 4];
        schedule.extend(std::iter::repeat_n((k, 0.5), opts.steps - 2));
        let mut rhs = vec![0.0; n + 1];
        let mut scratch = vec![0.0; n + 1];
        for (dt, theta) in schedule {
            // (I − θ dt L) u_new = (I + (1−θ) dt L) u_old on nodes first..n−1.
            let e = (1.0 - theta) * dt;
            for i in first..n {
                let mut lu = diag[i] * u[i] + upper[i] * u[i + 1];
                if i > 0 {
                    lu += lower[i] * u[i - 1];
                }
                rhs[i] = flush(u[i] + e * lu);
            }
            let c = theta * dt;
            solve_tridiagonal(first, n, |i| -c * lower[i], |i| 1.0 - c * diag[i], |i| -c * upper[i], &mut rhs, &mut scratch);
            u[first..n].copy_from_slice(&rhs[first..n]);
            masses.push(mass(&u));
        }
    }

    Ok(CnSolution { d: domain.d, ell, r0, dr: h, values: u, masses })
}

/// Far-field values decay geometrically from node to node; flushing them keeps subnormal
/// arithmetic, which is orders of magnitude slower, out of the sweeps.
fn flush(v: f64) -> f64 {
    if v.abs() < 1e-250 {
        0.0
    } else {
        v
    }
}

/// Thomas algorithm on rows first..end−1 with zero values outside; the solution
/// overwrites `rhs`.
fn solve_tridiagonal(
    first: usize,
    end: usize,
    a: impl Fn(usize) -> f64,
    b: impl Fn(usize) -> f64,
    c: impl Fn(usize) -> f64,
    rhs: &mut [f64],
    cp: &mut [f64],
) {
    let mut denom = b(first);
    cp[first] = c(first) / denom;
    rhs[first] /= denom;
    for i in first + 1..end {
        denom = b(i) - a(i) * cp[i - 1];
        cp[i] = c(i) / denom;
        rhs[i] = flush((rhs[i] - a(i) * rhs[i - 1]) / denom);
    }
    for i in (first..end - 1).rev() {
        rhs[i] = flush(rhs[i] - cp[i] * rhs[i + 1]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_solver() {
        // [2 1 0; 1 2 1; 0 1 2] x = [3 4 3] → x = 1.
        let mut rhs = vec![3.0, 4.0, 3.0, 0.0];
        let mut cp = vec![0.0; 4];
        solve_tridiagonal(0, 3, |_| 1.0, |_| 2.0, |_| 1.0, &mut rhs, &mut cp);
        for v in &rhs[..3] {
            assert!((v - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_time_returns_initial_data() {
        let f = RadialFunction::analytic(3, 0, |r| (-(r - 3.0) * (r - 3.0)).exp(), Support::compact(1.0, 8.0)).unwrap();
        let sol = pde_oracle_with(&f, 0.0, DomainSpec::exterior(3).unwrap(), &CnOptions { dr: 1e-2, ..Default::default() }).unwrap();
        assert!((sol.eval(3.0) - 1.0).abs() < 1e-8);
    }
}
