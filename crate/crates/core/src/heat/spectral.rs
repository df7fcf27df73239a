//! Spectral synthesis of the Dirichlet heat kernel of the exterior ball.
//!
//! In sector ℓ the kernel is p_ℓ(r, r′; t) = ∫₀^∞ e^{−tλ²} ũ_ℓ(r;λ) ũ_ℓ(r′;λ) λ dλ with
//! the normalized Weber modes ũ_ℓ, and the full kernel is
//!   K(x, y; t) = ω_{d−1}^{−1} Σ_ℓ Z_ℓ(cos θ) p_ℓ(r, r′; t),  Z_ℓ = (ℓ+α)/α · C_ℓ^α,  α = (d−2)/2,
//! Z_ℓ being the zonal kernel of degree-ℓ harmonics (the addition theorem).
//! [`sector_kernel`] returns p_ℓ/ω_{d−1}, so that for ℓ = 0 it is the kernel acting on radial
//! functions with respect to dy.

use std::cell::RefCell;

use super::{check_time, gauss_from_dist2, Geometry, KernelSample};
use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_breakpoints_lenient, integrate_vec, sphere_area, QuadOptions};
use crate::specfun::bessel::{bessel_j, BesselOrder};
use crate::specfun::eigenmode::normalized_modes;

/// Initial angular truncation of [`exterior_kernel`]; doubled until the tail is small.
pub const DEFAULT_ELL_MAX: u32 = 32;
const ELL_CAP: u32 = 4096;
const REL_TOL: f64 = 1e-11;

/// Frequencies beyond max(20, 10/√t) carry a factor below e^{−100}.
fn lambda_cutoff(t: f64) -> f64 {
    20f64.max(10.0 / t.sqrt())
}

/// Breakpoints resolving the oscillation of the mode products in λ and the λ → 0 region.
fn lambda_breaks(r: f64, rp: f64, lambda_max: f64) -> Vec<f64> {
    let width = (std::f64::consts::PI / (r + rp).max(1.0)).min(1.0);
    let mut pts = vec![0.0];
    for k in (1..=6).rev() {
        let x = width * 4f64.powi(-k);
        pts.push(x);
    }
    let n = (lambda_max / width).ceil() as usize;
    pts.extend((1..=n).map(|i| (i as f64 * width).min(lambda_max)));
    pts.dedup();
    pts
}

fn check_radius(r: f64, lo: f64) -> Result<()> {
    if r >= lo && r.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("radius must be at least {lo}, got {r}")))
    }
}

/// ∫ e^{−tλ²} ũ_ℓ(r) ũ_ℓ(r′) λ dλ for ℓ = 0..=ell_max, all in one adaptive pass.
fn sector_integrals(d: u32, ell_max: u32, r: f64, rp: f64, t: f64, tol: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = ell_max as usize + 1;
    let lmax = lambda_cutoff(t);
    let pts = lambda_breaks(r, rp, lmax);
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut failure = None;
    let integrand = |lambda: f64, out: &mut [f64]| {
        if lambda <= 0.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let ok = normalized_modes(d, r, lambda, &mut a).and_then(|_| normalized_modes(d, rp, lambda, &mut b));
        if let Err(e) = ok {
            failure.get_or_insert(e);
        }
        let w = lambda * (-t * lambda * lambda).exp();
        for k in 0..n {
            out[k] = w * a[k] * b[k];
        }
    };
    let opts = QuadOptions::with_tol(tol).budget(2_000_000);
    let (res, ok) = integrate_vec(integrand, n, &pts, &opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !ok {
        let i = (0..n).max_by(|&i, &j| res.errors[i].total_cmp(&res.errors[j])).unwrap_or(0);
        return Err(Error::NonConvergence {
            what: "sector heat kernel".into(),
            estimate: res.values[i],
            error: res.errors[i],
        });
    }
    Ok((res.values, res.errors))
}

/// Dirichlet heat kernel of sector ℓ on (1, ∞), divided by ω_{d−1}. Vanishes at r = 1.
pub fn sector_kernel(d: u32, ell: u32, r: f64, rprime: f64, t: f64) -> Result<KernelSample> {
    sector_kernel_with(d, ell, r, rprime, t, REL_TOL)
}

pub fn sector_kernel_with(d: u32, ell: u32, r: f64, rprime: f64, t: f64, tol: f64) -> Result<KernelSample> {
    check_time(t)?;
    check_radius(r, 1.0)?;
    check_radius(rprime, 1.0)?;
    let geometry = Geometry::Sector { ell, r, rprime };
    if r == 1.0 || rprime == 1.0 {
        return Ok(KernelSample { geometry, t, value: 0.0, err: 0.0 });
    }
    let n = ell as usize + 1;
    let lmax = lambda_cutoff(t);
    let pts = lambda_breaks(r, rprime, lmax);
    // The quadrature wants Fn, so the mode buffers live in RefCells.
    let bufs = RefCell::new((vec![0.0; n], vec![0.0; n]));
    let failure = RefCell::new(None);
    let f = |lambda: f64| {
        if lambda <= 0.0 {
            return 0.0;
        }
        let (a, b) = &mut *bufs.borrow_mut();
        let ok = normalized_modes(d, r, lambda, a).and_then(|_| normalized_modes(d, rprime, lambda, b));
        if let Err(e) = ok {
            failure.borrow_mut().get_or_insert(e);
        }
        lambda * (-t * lambda * lambda).exp() * a[n - 1] * b[n - 1]
    };
    let opts = QuadOptions::with_tol(tol).budget(2_000_000);
    let (res, ok) = integrate_breakpoints_lenient(f, &pts, &opts)?;
    let failure = failure.into_inner();
    if let Some(e) = failure {
        return Err(e);
    }
    if !ok {
        return Err(Error::NonConvergence {
            what: "sector heat kernel".into(),
            estimate: res.value,
            error: res.abs_error_estimate,
        });
    }
    let omega = sphere_area(d);
    Ok(KernelSample { geometry, t, value: res.value / omega, err: res.abs_error_estimate / omega })
}

/// Whole-space counterpart of [`sector_kernel`]: ∫ e^{−tλ²} j_ℓ(λr) j_ℓ(λr′) λ^{d−1} dλ / ω_{d−1}
/// with j_ℓ(z) = z^{−α} J_{α+ℓ}(z).
pub fn whole_sector_kernel(d: u32, ell: u32, r: f64, rprime: f64, t: f64) -> Result<KernelSample> {
    check_time(t)?;
    check_radius(r, f64::MIN_POSITIVE)?;
    check_radius(rprime, f64::MIN_POSITIVE)?;
    let order = BesselOrder::for_sector(d, ell)?;
    let alpha = (d as f64 - 2.0) / 2.0;
    let j = |z: f64| -> f64 { bessel_j(order, z).map(|v| v * z.powf(-alpha)).unwrap_or(f64::NAN) };
    let f = |lambda: f64| {
        if lambda <= 0.0 {
            return 0.0;
        }
        lambda.powi(d as i32 - 1) * (-t * lambda * lambda).exp() * j(lambda * r) * j(lambda * rprime)
    };
    let pts = lambda_breaks(r, rprime, lambda_cutoff(t));
    let (res, ok) = integrate_breakpoints_lenient(f, &pts, &QuadOptions::with_tol(REL_TOL).budget(2_000_000))?;
    if !ok || !res.value.is_finite() {
        return Err(Error::NonConvergence {
            what: "whole-space sector heat kernel".into(),
            estimate: res.value,
            error: res.abs_error_estimate,
        });
    }
    let omega = sphere_area(d);
    Ok(KernelSample {
        geometry: Geometry::Sector { ell, r, rprime },
        t,
        value: res.value / omega,
        err: res.abs_error_estimate / omega,
    })
}

/// Zonal harmonics Z_ℓ(x) = (ℓ+α)/α · C_ℓ^α(x), α = (d−2)/2, for ℓ = 0..=ell_max;
/// Z_ℓ(1) is the dimension of the degree-ℓ spherical harmonics.
pub fn harmonic_projector(d: u32, ell_max: u32, x: f64) -> Vec<f64> {
    let alpha = (d as f64 - 2.0) / 2.0;
    let n = ell_max as usize + 1;
    let mut c = vec![0.0; n];
    c[0] = 1.0;
    if n > 1 {
        c[1] = 2.0 * alpha * x;
    }
    for l in 2..n {
        let lf = l as f64;
        c[l] = (2.0 * x * (lf + alpha - 1.0) * c[l - 1] - (lf + 2.0 * alpha - 2.0) * c[l - 2]) / lf;
    }
    c.iter().enumerate().map(|(l, v)| (l as f64 + alpha) / alpha * v).collect()
}

/// Exterior-ball heat kernel at points x, y ∈ ℝ^d with |x|, |y| ≥ 1.
pub fn exterior_kernel(d: u32, x: &[f64], y: &[f64], t: f64, ell_max: u32) -> Result<KernelSample> {
    if x.len() != d as usize || y.len() != d as usize {
        return Err(invalid(format!("points must have {d} coordinates")));
    }
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rp = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    check_radius(r, 1.0)?;
    check_radius(rp, 1.0)?;
    let cos = (x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / (r * rp)).clamp(-1.0, 1.0);
    let mut s = exterior_kernel_polar(d, r, rp, cos, t, ell_max)?;
    s.geometry = Geometry::Points { x: x.to_vec(), y: y.to_vec() };
    Ok(s)
}

/// Exterior-ball heat kernel in polar form. The angular sum starts at `ell_max` sectors
/// and doubles until the last two terms are negligible; the reported error adds those
/// two terms to the quadrature error.
pub fn exterior_kernel_polar(d: u32, r: f64, rprime: f64, cos_theta: f64, t: f64, ell_max: u32) -> Result<KernelSample> {
    check_time(t)?;
    check_radius(r, 1.0)?;
    check_radius(rprime, 1.0)?;
    if !(-1.0..=1.0).contains(&cos_theta) {
        return Err(invalid("cos θ must lie in [−1, 1]"));
    }
    let geometry = Geometry::Polar { r, rprime, cos_theta };
    if r == 1.0 || rprime == 1.0 {
        return Ok(KernelSample { geometry, t, value: 0.0, err: 0.0 });
    }
    let omega = sphere_area(d);
    // Size of the whole-space kernel, used as the absolute scale of the tail test.
    let rho2 = r * r + rprime * rprime - 2.0 * r * rprime * cos_theta;
    let scale = gauss_from_dist2(d, rho2, t);
    let mut ell = ell_max.max(2);
    loop {
        let (vals, errs) = sector_integrals(d, ell, r, rprime, t, REL_TOL)?;
        let z = harmonic_projector(d, ell, cos_theta);
        let terms: Vec<f64> = vals.iter().zip(&z).map(|(p, z)| p * z / omega).collect();
        let value: f64 = terms.iter().sum();
        let quad: f64 = errs.iter().zip(&z).map(|(e, z)| e * z.abs() / omega).sum();
        let n = terms.len();
        let tail = terms[n - 1].abs() + terms[n - 2].abs();
        let magnitude = terms.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if tail <= 1e-10 * value.abs().max(scale) || tail <= 1e-14 * magnitude {
            return Ok(KernelSample { geometry, t, value, err: quad + tail });
        }
        if ell >= ELL_CAP {
            return Err(Error::NonConvergence {
                what: "angular sum of the exterior heat kernel".into(),
                estimate: value,
                error: tail,
            });
        }
        ell *= 2;
    }
}

/// d = 3, ℓ = 0 exterior kernel by the method of images for v = r·u on the half-line:
/// [G_t(r − r′) − G_t(r + r′ − 2)] / (4π r r′), G_t the one-dimensional Gaussian.
pub fn image_kernel_3d(r: f64, rprime: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    check_radius(r, 1.0)?;
    check_radius(rprime, 1.0)?;
    let a = (r - rprime).powi(2) / (4.0 * t);
    let b = (r + rprime - 2.0).powi(2) / (4.0 * t);
    let g = (-a).exp() * -(a - b).exp_m1() / (4.0 * std::f64::consts::PI * t).sqrt();
    Ok(g / (4.0 * std::f64::consts::PI * r * rprime))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zonal_harmonics_at_one_count_harmonics() {
        // Dimension of degree-ℓ harmonics in d = 4 is (ℓ+1)².
        let z = harmonic_projector(4, 6, 1.0);
        for (l, v) in z.iter().enumerate() {
            assert!((v - ((l + 1) * (l + 1)) as f64).abs() < 1e-10);
        }
        // d = 3: (2ℓ+1) P_ℓ; P_2(x) = (3x²−1)/2.
        let z = harmonic_projector(3, 2, 0.3);
        assert!((z[2] - 5.0 * (3.0 * 0.09 - 1.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn radial_sector_matches_images() {
        for &(r, rp, t) in &[(1.5, 2.0, 0.5), (2.0, 3.5, 1.0), (1.1, 1.2, 0.05)] {
            let s = sector_kernel(3, 0, r, rp, t).unwrap();
            let o = image_kernel_3d(r, rp, t).unwrap();
            assert!((s.value - o).abs() < 1e-8 * o, "{r} {rp} {t}: {} vs {o}", s.value);
        }
    }
}
