//! Heat kernels of the whole space, a half-space and the exterior of the unit ball,
//! a Crank–Nicolson oracle for radial evolutions, and two-sided bound verification.



mod bounds;
mod pde;
mod spectral;

use serde::Serialize;



pub use bounds::{boundary_factor, sample_geometries, verify_heat_bounds, BoundSample, HeatBoundReport};
pub use pde::{pde_oracle, pde_oracle_with, CnOptions, CnSolution};
pub use spectral::{
    exterior_kernel, exterior_kernel_polar, harmonic_projector, image_kernel_3d, sector_kernel,
    sector_kernel_with, whole_sector_kernel, DEFAULT_ELL_MAX,
};

use crate::domain::{DomainKind, DomainSpec};
use crate::error::{invalid, Result};
use crate::radial::RadialFunction;
use crate::transforms::{apply_multiplier_with, Multiplier, SpectralGrid};

/// Where a kernel was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Geometry {
    Points { x: Vec<f64>, y: Vec<f64> },
    Polar { r: f64, rprime: f64, cos_theta: f64 },
    Sector { ell: u32, r: f64, rprime: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelSample {
    pub geometry: Geometry,
    pub t: f64,
    pub value: f64,
    pub err: f64,
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("time must be positive and finite, got {t}")))
    }
}

fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// (4πt)^{−d/2} exp(−ρ²/4t) as a function of the squared distance ρ².
pub fn gauss_from_dist2(d: u32, rho2: f64, t: f64) -> f64 {
    (4.0 * std::f64::consts::PI * t).powf(-(d as f64) / 2.0) * (-rho2 / (4.0 * t)).exp()
}

/// Whole-space heat kernel (4πt)^{−d/2} exp(−|x−y|²/4t).
pub fn gauss_kernel(d: u32, x: &[f64], y: &[f64], t: f64) -> Result<f64> {
    check_time(t)?;
    if x.len() != d as usize || y.len() != d as usize {
        return Err(invalid(format!("points must have {d} coordinates")));
    }
    Ok(gauss_from_dist2(d, dist2(x, y), t))
}

/// Half-space {z : z·normal > offset}, normal a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl HalfSpace {
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite() && offset.is_finite()) {
            return Err(invalid("half-space needs a nonzero normal and finite offset"));
        }
        Ok(Self { normal: normal.iter().map(|v| v / n).collect(), offset: offset / n })
    }

    /// The half-space tangent to the unit sphere at y/|y|, containing y.
    pub fn supporting(y: &[f64]) -> Result<Self> {
        let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self::new(y.iter().map(|v| v / n).collect(), 1.0)
    }

    /// Signed distance of z to the boundary plane; positive inside.
    pub fn distance(&self, z: &[f64]) -> f64 {
        z.iter().zip(&self.normal).map(|(a, b)| a * b).sum::<f64>() - self.offset
    }

    pub fn reflect(&self, z: &[f64]) -> Vec<f64> {
        let h = self.distance(z);
        z.iter().zip(&self.normal).map(|(a, n)| a - 2.0 * h * n).collect()
    }
}

/// Dirichlet heat kernel of a half-space by reflection; zero unless both points lie in it.
pub fn halfspace_kernel(d: u32, x: &[f64], y: &[f64], t: f64, plane: &HalfSpace) -> Result<f64> {
    check_time(t)?;
    if x.len() != d as usize || y.len() != d as usize || plane.normal.len() != d as usize {
        return Err(invalid(format!("points and normal must have {d} coordinates")));
    }
    if plane.distance(x) <= 0.0 || plane.distance(y) <= 0.0 {
        return Ok(0.0);
    }
    let direct = dist2(x, y);
    let image = dist2(x, &plane.reflect(y));
    // Factor out the direct Gaussian so deep-interior values keep full relative accuracy.
    let g = gauss_from_dist2(d, direct, t);
    Ok(g * -((direct - image) / (4.0 * t)).exp_m1())
}

/// e^{tΔ} f for a sector function, through the spectral multiplier e^{−tλ²}.
pub fn heat_apply_radial(f: &RadialFunction, t: f64, domain: DomainSpec) -> Result<RadialFunction> {
    heat_apply_radial_with(f, t, domain, &SpectralGrid::default())
}

pub fn heat_apply_radial_with(
    f: &RadialFunction,
    t: f64,
    domain: DomainSpec,
    grid: &SpectralGrid,
) -> Result<RadialFunction> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("time must be non-negative, got {t}")));
    }
    if domain.kind == DomainKind::HalfSpace {
        return Err(invalid("radial heat evolution needs the whole space or the exterior ball"));
    }
    apply_multiplier_with(&Multiplier::heat(t), f, domain, grid)
}
