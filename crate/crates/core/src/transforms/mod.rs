//! Weber–Orr (exterior ball) and Hankel (whole space) transforms per angular sector,
//! spectral multipliers, and fractional powers of both Laplacians.

pub mod basis;
pub mod multiplier;

use std::sync::Arc;

use num_complex::Complex64;

pub use basis::{set_basis_store, BasisKey, BasisStore, SpectralBasis, SpectralGrid};
pub use multiplier::{MikhlinReport, Multiplier};

use crate::domain::{DomainKind, DomainSpec};
use crate::error::{invalid, Result};
use crate::radial::{RadialFunction, Support, Tail};

/// Transform coefficients of one sector function on a basis's λ-grid.
///
/// For exterior bases the stored values are F(λ)/A(λ), the coefficients against the
/// normalized modes; [`SpectralFunction::value`] restores F(λ).
#[derive(Debug, Clone)]
pub struct SpectralFunction {
    basis: Arc<SpectralBasis>,
    domain: DomainSpec,
    ell: u32,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
}

impl SpectralFunction {
    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn lambdas(&self) -> &[f64] {
        self.basis.lambdas()
    }

    pub fn coefficients(&self) -> (&[f64], Option<&[f64]>) {
        (&self.re, self.im.as_deref())
    }

    /// F(λ_i), the transform against the unnormalized mode.
    pub fn value(&self, i: usize) -> Complex64 {
        let a = self.basis.amplitude()[i];
        Complex64::new(self.re[i], self.im.as_ref().map_or(0.0, |v| v[i])) * a
    }

    /// (∫ |F|² dspectral)^{1/2}; equals the L²(r^{d−1}dr) norm by Plancherel.
    pub fn l2_norm(&self) -> f64 {
        let w = self.basis.lambda_weights();
        let mut s: f64 = self.re.iter().zip(w).map(|(v, w)| v * v * w).sum();
        if let Some(im) = &self.im {
            s += im.iter().zip(w).map(|(v, w)| v * v * w).sum::<f64>();
        }
        s.sqrt()
    }

    pub fn apply(&self, m: &Multiplier) -> SpectralFunction {
        let lams = self.basis.lambdas();
        let mut re = Vec::with_capacity(lams.len());
        let mut im = Vec::with_capacity(lams.len());
        let complex = self.im.is_some() || !m.is_real();
        for (i, &l) in lams.iter().enumerate() {
            let z = Complex64::new(self.re[i], self.im.as_ref().map_or(0.0, |v| v[i])) * m.eval(l);
            re.push(z.re);
            im.push(z.im);
        }
        SpectralFunction {
            basis: self.basis.clone(),
            domain: self.domain,
            ell: self.ell,
            re,
            im: complex.then_some(im),
        }
    }

    /// Inverse transform sampled on the basis's radial grid.
    pub fn inverse(&self) -> Result<RadialFunction> {
        let re = self.basis.inverse(&self.re);
        let im = self.im.as_ref().map(|v| self.basis.inverse(v));
        RadialFunction::sampled(self.domain.d, self.ell, self.basis.r_grid().clone(), re, im)
    }

    /// Inverse transform as an exact pointwise synthesis Σ_i c_i φ(r;λ_i) μ_i. It vanishes
    /// identically on the obstacle boundary and extends beyond the radial grid.
    pub fn inverse_pointwise(&self) -> Result<RadialFunction> {
        let basis = self.basis.clone();
        let lo = match self.domain.kind {
            DomainKind::ExteriorBall => 1.0,
            _ => 0.0,
        };
        let hi = basis.r_grid().upper();
        let support = Support::with_tail(lo, hi, Tail::Gaussian { scale: 1.0 });
        let re = self.re.clone();
        let b1 = basis.clone();
        let f_re = move |r: f64| b1.inverse_at(&re, r);
        match &self.im {
            None => RadialFunction::analytic(self.domain.d, self.ell, f_re, support),
            Some(im) => {
                let im = im.clone();
                let f_im = move |r: f64| basis.inverse_at(&im, r);
                RadialFunction::analytic_complex(self.domain.d, self.ell, f_re, f_im, support)
            }
        }
    }
}

fn basis_for(domain: DomainSpec, ell: u32, grid: &SpectralGrid) -> Result<Arc<SpectralBasis>> {
    SpectralBasis::get(BasisKey { kind: domain.kind, d: domain.d, ell, grid: *grid })
}

/// Forward transform of f in the given domain on the given grid.
pub fn forward(f: &RadialFunction, domain: DomainSpec, grid: &SpectralGrid) -> Result<SpectralFunction> {
    if f.d() != domain.d {
        return Err(invalid(format!(
            "function lives in dimension {} but the domain in {}",
            f.d(),
            domain.d
        )));
    }
    if domain.kind == DomainKind::HalfSpace {
        return Err(invalid("radial transforms are defined for the whole space and the exterior ball"));
    }
    let basis = basis_for(domain, f.ell(), grid)?;
    let nodes = basis.r_grid().nodes();
    let same_grid = f.grid().is_some_and(|g| g.as_ref() == basis.r_grid().as_ref());
    let (re_vals, im_vals) = match (same_grid, f.samples()) {
        (true, Some((re, im))) => (re.to_vec(), im.map(|v| v.to_vec())),
        _ => f.sample_at(nodes),
    };
    let re = basis.forward(&re_vals);
    let im = im_vals.map(|v| basis.forward(&v));
    Ok(SpectralFunction { basis, domain, ell: f.ell(), re, im })
}

pub fn weber_forward(f: &RadialFunction) -> Result<SpectralFunction> {
    weber_forward_with(f, &SpectralGrid::default())
}

pub fn weber_forward_with(f: &RadialFunction, grid: &SpectralGrid) -> Result<SpectralFunction> {
    forward(f, DomainSpec::exterior(f.d())?, grid)
}

pub fn weber_inverse(spec: &SpectralFunction) -> Result<RadialFunction> {
    if spec.domain.kind != DomainKind::ExteriorBall {
        return Err(invalid("not a Weber transform"));
    }
    spec.inverse()
}

pub fn hankel_forward(f: &RadialFunction) -> Result<SpectralFunction> {
    hankel_forward_with(f, &SpectralGrid::default())
}

pub fn hankel_forward_with(f: &RadialFunction, grid: &SpectralGrid) -> Result<SpectralFunction> {
    forward(f, DomainSpec::whole(f.d())?, grid)
}

pub fn hankel_inverse(spec: &SpectralFunction) -> Result<RadialFunction> {
    if spec.domain.kind != DomainKind::WholeSpace {
        return Err(invalid("not a Hankel transform"));
    }
    spec.inverse()
}

/// m(√−Δ) f: forward transform, pointwise multiplication, inverse transform.
pub fn apply_multiplier(m: &Multiplier, f: &RadialFunction, domain: DomainSpec) -> Result<RadialFunction> {
    apply_multiplier_with(m, f, domain, &SpectralGrid::default())
}

pub fn apply_multiplier_with(
    m: &Multiplier,
    f: &RadialFunction,
    domain: DomainSpec,
    grid: &SpectralGrid,
) -> Result<RadialFunction> {
    forward(f, domain, grid)?.apply(m).inverse()
}

/// (−Δ)^{s/2} f for 0 ≤ s ≤ 4.
pub fn frac_power(s: f64, f: &RadialFunction, domain: DomainSpec) -> Result<RadialFunction> {
    frac_power_with(s, f, domain, &SpectralGrid::default())
}

pub fn frac_power_with(
    s: f64,
    f: &RadialFunction,
    domain: DomainSpec,
    grid: &SpectralGrid,
) -> Result<RadialFunction> {
    if !(0.0..=4.0).contains(&s) {
        return Err(invalid(format!("fractional power s must lie in [0, 4], got {s}")));
    }
    apply_multiplier_with(&Multiplier::power(s), f, domain, grid)
}

/// (−Δ)^{−s/2} f for 0 < s < d, with the share of the result contributed by λ < λ_low,
/// measured as the largest pointwise ratio on the radial grid.
pub fn riesz_potential_spectral(
    s: f64,
    f: &RadialFunction,
    domain: DomainSpec,
    grid: &SpectralGrid,
    lambda_low: f64,
) -> Result<(RadialFunction, f64)> {
    if !(s > 0.0 && s < domain.d as f64) {
        return Err(invalid(format!("Riesz potentials need 0 < s < d, got s = {s}")));
    }
    let spec = forward(f, domain, grid)?.apply(&Multiplier::power(-s));
    let full = spec.inverse()?;
    let low = spec
        .apply(&Multiplier::real("low-pass", move |l| if l < lambda_low { 1.0 } else { 0.0 }))
        .inverse()?;
    let (fv, _) = full.samples().expect("sampled");
    let (lv, _) = low.samples().expect("sampled");
    let peak = fv.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let share = lv.iter().fold(0.0f64, |m, v| m.max(v.abs())) / peak.max(f64::MIN_POSITIVE);
    Ok((full, share))
}
