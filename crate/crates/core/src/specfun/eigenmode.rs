//! Generalized eigenfunctions of the radial Dirichlet Laplacian outside the unit ball.
//!
//! In sector ℓ of ℝ^d, with α = (d − 2)/2 and ν = α + ℓ,
//! u(r; λ) = −r^{−α} [J_ν(λr) Y_ν(λ) − J_ν(λ) Y_ν(λr)]
//! solves −u'' − (d−1)/r u' + ℓ(ℓ+d−2)/r² u = λ² u with u(1; λ) = 0.
//! For ℓ = 0 the prefactor r^{−α} coincides with r^{−ν}.

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::specfun::bessel::{bessel_jy, bessel_jy_ladder, BesselOrder};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenmodeQuery {
    pub d: u32,
    pub ell: u32,
    pub r: f64,
    pub lambda: f64,
}

impl EigenmodeQuery {
    pub fn new(d: u32, ell: u32, r: f64, lambda: f64) -> Result<Self> {
        if d < 3 {
            return Err(invalid(format!("dimension must be at least 3, got {d}")));
        }
        ensure_finite("r", r)?;
        ensure_finite("lambda", lambda)?;
        if r < 1.0 {
            return Err(invalid(format!("r must be at least 1, got {r}")));
        }
        if lambda <= 0.0 {
            return Err(invalid(format!("lambda must be positive, got {lambda}")));
        }
        Ok(Self { d, ell, r, lambda })
    }

    fn alpha(&self) -> f64 {
        (self.d as f64 - 2.0) / 2.0
    }
}

pub fn eigenmode(q: EigenmodeQuery) -> Result<f64> {
    let order = BesselOrder::for_sector(q.d, q.ell)?;
    if q.r == 1.0 {
        return Ok(0.0);
    }
    let (ja, ya) = bessel_jy(order, q.lambda)?;
    let (jr, yr) = bessel_jy(order, q.lambda * q.r)?;
    Ok(-q.r.powf(-q.alpha()) * (jr * ya - ja * yr))
}

/// ∂_r u(r; λ) = λ r^{−ν} [J_{ν+1}(λr) Y_ν(λ) − J_ν(λ) Y_{ν+1}(λr)], sector ℓ = 0 only.
pub fn eigenmode_deriv(q: EigenmodeQuery) -> Result<f64> {
    if q.ell != 0 {
        return Err(Error::UnsupportedSector(q.ell));
    }
    let order = BesselOrder::for_sector(q.d, 0)?;
    let mut ja = [0.0; 2];
    let mut ya = [0.0; 2];
    let mut jr = [0.0; 2];
    let mut yr = [0.0; 2];
    bessel_jy_ladder(order, q.lambda, &mut ja, &mut ya)?;
    bessel_jy_ladder(order, q.lambda * q.r, &mut jr, &mut yr)?;
    Ok(q.lambda * q.r.powf(-order.nu()) * (jr[1] * ya[0] - ja[0] * yr[1]))
}

/// Inverse-transform density ρ_ν(λ) = λ / (J_ν(λ)² + Y_ν(λ)²).
pub fn spectral_density(d: u32, ell: u32, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 || !lambda.is_finite() {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    let (j, y) = bessel_jy(BesselOrder::for_sector(d, ell)?, lambda)?;
    let a2 = j * j + y * y;
    Ok(if a2.is_finite() { lambda / a2 } else { 0.0 })
}

/// Modes of sectors ℓ = 0..out.len() at one (r, λ), divided by √(J_ν(λ)² + Y_ν(λ)²),
/// so that ũ(r)ũ(r′)λ equals u(r)u(r′)ρ(λ) without overflow at small λ and large ℓ.
///
/// Entries whose normalization overflows are computed with Y_ν(λ) → −∞,
/// where the mode reduces to r^{−α} J_ν(λr).
pub fn normalized_modes(d: u32, r: f64, lambda: f64, out: &mut [f64]) -> Result<()> {
    let n = out.len();
    if n == 0 {
        return Ok(());
    }
    EigenmodeQuery::new(d, 0, r, lambda)?;
    let order = BesselOrder::for_sector(d, 0)?;
    let mut ja = vec![0.0; n];
    let mut ya = vec![0.0; n];
    let mut jr = vec![0.0; n];
    let mut yr = vec![0.0; n];
    bessel_jy_ladder(order, lambda, &mut ja, &mut ya)?;
    bessel_jy_ladder(order, lambda * r, &mut jr, &mut yr)?;
    let pre = -r.powf(-(d as f64 - 2.0) / 2.0);
    for k in 0..n {
        let amp = ja[k].hypot(ya[k]);
        let (c, s) = if amp.is_finite() && amp > 0.0 {
            (ya[k] / amp, ja[k] / amp)
        } else {
            (-1.0, 0.0)
        };
        let cross = s * yr[k];
        let cross = if cross.is_finite() { cross } else { 0.0 };
        let v = pre * (jr[k] * c - cross);
        out[k] = if v.is_finite() { v } else { 0.0 };
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn three_dimensional_mode_closed_form() {
        for &lambda in &[1e-3, 0.05, 0.7, 3.0, 40.0] {
            for &r in &[1.0, 1.001, 1.5, 4.0, 37.0] {
                let u = eigenmode(EigenmodeQuery::new(3, 0, r, lambda).unwrap()).unwrap();
                let oracle = 2.0 * (lambda * (r - 1.0)).sin() / (PI * lambda * r);
                assert!((u - oracle).abs() < 1e-10 * (1.0 + oracle.abs()), "r={r} λ={lambda}");
            }
        }
    }

    #[test]
    fn normalized_modes_match_direct_formula() {
        let lambda = 0.8;
        let r = 2.3;
        let mut out = [0.0; 6];
        normalized_modes(4, r, lambda, &mut out).unwrap();
        for (ell, v) in out.iter().enumerate() {
            let u = eigenmode(EigenmodeQuery::new(4, ell as u32, r, lambda).unwrap()).unwrap();
            let (j, y) = bessel_jy(BesselOrder::for_sector(4, ell as u32).unwrap(), lambda).unwrap();
            let expect = u / j.hypot(y);
            assert!((v - expect).abs() < 1e-12 * (1.0 + expect.abs()), "ell={ell}");
        }
    }

    #[test]
    fn deriv_requires_radial_sector() {
        let q = EigenmodeQuery::new(3, 1, 2.0, 0.5).unwrap();
        assert_eq!(eigenmode_deriv(q), Err(Error::UnsupportedSector(1)));
    }

    #[test]
    fn query_validation() {
        assert!(EigenmodeQuery::new(3, 0, 0.5, 1.0).is_err());
        assert!(EigenmodeQuery::new(3, 0, 2.0, 0.0).is_err());
        assert!(EigenmodeQuery::new(2, 0, 2.0, 1.0).is_err());
    }
}
