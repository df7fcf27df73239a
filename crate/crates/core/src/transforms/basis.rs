//! Discretized radial eigenfunction transforms.
//!
//! A [`SpectralBasis`] tabulates the modes of one sector on a radial panel grid and a
//! frequency panel grid, so that forward and inverse transforms are weighted
//! matrix–vector products.
//!
//! Exterior ball (Weber–Orr), measure r^{d−1} dr on (1, ∞):
//!   F(λ) = ∫ f u(r;λ) r^{d−1} dr,   f(r) = ∫ F(λ) u(r;λ) ρ(λ) dλ,  ρ = λ/(J_ν(λ)² + Y_ν(λ)²).
//! Whole space (Hankel), measure r^{d−1} dr on (0, ∞):
//!   F(λ) = ∫ f j(r;λ) r^{d−1} dr,   f(r) = ∫ F(λ) j(r;λ) λ^{d−1} dλ,  j = (λr)^{−(d−2)/2} J_ν(λr).
//!
//! Exterior modes are stored divided by A(λ) = √(J_ν(λ)² + Y_ν(λ)²), which turns ρ into λ
//! and keeps high sectors finite at small λ.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::domain::DomainKind;
use crate::error::{invalid, Result};
use crate::quadrature::PanelGrid;
use crate::specfun::bessel::{bessel_jy_ladder, BesselOrder};
use crate::specfun::gamma::gamma_unchecked;

/// Panel layout of the radial and frequency grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub r_max: f64,
    pub r_panel: f64,
    pub r_order: usize,
    pub lambda_max: f64,
    pub lambda_panel: f64,
    pub lambda_order: usize,
    /// Number of dyadic panels refining [0, lambda_panel] towards λ = 0.
    pub lambda_dyadic_levels: u32,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        Self {
            r_max: 24.0,
            r_panel: 0.125,
            r_order: 16,
            lambda_max: 128.0,
            lambda_panel: 0.5,
            lambda_order: 12,
            lambda_dyadic_levels: 12,
        }
    }
}

impl SpectralGrid {
    /// A smaller grid for quick checks: r ≤ 12, λ ≤ 64.
    pub fn coarse() -> Self {
        Self { r_max: 12.0, lambda_max: 64.0, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.r_max > 1.5
            && self.r_panel > 0.0
            && self.r_order >= 4
            && self.lambda_max >= 20.0
            && self.lambda_panel > 0.0
            && self.lambda_order >= 4
            && self.lambda_panel < self.lambda_max;
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("inconsistent spectral grid {self:?}")))
        }
    }

    fn r_grid(&self, kind: DomainKind) -> Result<PanelGrid> {
        let lo = if kind == DomainKind::WholeSpace { 0.0 } else { 1.0 };
        let n = ((self.r_max - lo) / self.r_panel).round().max(1.0) as usize;
        // Whole-space panels are aligned with the exterior ones for r ≥ 1.
        PanelGrid::uniform(lo, lo + n as f64 * self.r_panel, n, self.r_order)
    }

    fn lambda_grid(&self) -> Result<PanelGrid> {
        let h = self.lambda_panel;
        let mut breaks = vec![0.0];
        for k in (1..=self.lambda_dyadic_levels).rev() {
            breaks.push(h * 2f64.powi(-(k as i32)));
        }
        let n = (self.lambda_max / h).ceil() as usize;
        for i in 1..=n {
            breaks.push((i as f64 * h).min(self.lambda_max));
        }
        breaks.dedup();
        PanelGrid::new(breaks, self.lambda_order)
    }

    /// Stable text form, used for hashing cache keys.
    pub fn fingerprint(&self) -> String {
        format!(
            "r_max={};r_panel={};r_order={};lambda_max={};lambda_panel={};lambda_order={};levels={}",
            self.r_max,
            self.r_panel,
            self.r_order,
            self.lambda_max,
            self.lambda_panel,
            self.lambda_order,
            self.lambda_dyadic_levels
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisKey {
    pub kind: DomainKind,
    pub d: u32,
    pub ell: u32,
    pub grid: SpectralGrid,
}

impl BasisKey {
    pub fn fingerprint(&self) -> String {
        format!("{:?};d={};ell={};{}", self.kind, self.d, self.ell, self.grid.fingerprint())
    }
}

/// Persistent storage for mode tables, installed by applications that cache to disk.
pub trait BasisStore: Send + Sync {
    fn load(&self, key: &BasisKey, expected_len: usize) -> Option<Vec<f64>>;
    fn store(&self, key: &BasisKey, modes: &[f64]);
}

static STORE: OnceLock<Mutex<Option<Arc<dyn BasisStore>>>> = OnceLock::new();
static MEMORY: OnceLock<Mutex<HashMap<String, Arc<SpectralBasis>>>> = OnceLock::new();

pub fn set_basis_store(store: Option<Arc<dyn BasisStore>>) {
    *STORE.get_or_init(|| Mutex::new(None)).lock().expect("store lock") = store;
}

pub struct SpectralBasis {
    key: BasisKey,
    r_grid: Arc<PanelGrid>,
    lambda_grid: Arc<PanelGrid>,
    /// Row i holds the (normalized) mode at λ_i on every radial node.
    modes: Vec<f64>,
    r_weights: Vec<f64>,
    lambda_weights: Vec<f64>,
    /// A(λ_i) for exterior bases, 1 otherwise.
    amplitude: Vec<f64>,
    /// (Y_ν(λ_i)/A, J_ν(λ_i)/A) for pointwise evaluation of exterior modes.
    phase: Vec<(f64, f64)>,
}

impl std::fmt::Debug for SpectralBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SpectralBasis({:?}, {} radial × {} frequency nodes)",
            self.key,
            self.r_grid.len(),
            self.lambda_grid.len()
        )
    }
}

impl SpectralBasis {
    /// Shared basis for a key; built once per process (or loaded from the installed store).
    pub fn get(key: BasisKey) -> Result<Arc<Self>> {
        if key.kind == DomainKind::HalfSpace {
            return Err(invalid("no radial transform for the half-space"));
        }
        if key.d < 3 {
            return Err(invalid(format!("dimension must be at least 3, got {}", key.d)));
        }
        key.grid.validate()?;
        let fp = key.fingerprint();
        let memory = MEMORY.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(b) = memory.lock().expect("basis cache lock").get(&fp) {
            return Ok(b.clone());
        }
        let basis = Arc::new(Self::build(key)?);
        memory.lock().expect("basis cache lock").insert(fp, basis.clone());
        Ok(basis)
    }

    fn build(key: BasisKey) -> Result<Self> {
        let r_grid = Arc::new(key.grid.r_grid(key.kind)?);
        let lambda_grid = Arc::new(key.grid.lambda_grid()?);
        let order = BesselOrder::for_sector(key.d, key.ell)?;
        let alpha = (key.d as f64 - 2.0) / 2.0;
        let dm1 = (key.d - 1) as i32;
        let exterior = key.kind == DomainKind::ExteriorBall;

        let mut amplitude = Vec::with_capacity(lambda_grid.len());
        let mut phase = Vec::with_capacity(lambda_grid.len());
        let mut lambda_weights = Vec::with_capacity(lambda_grid.len());
        for (&lam, &w) in lambda_grid.nodes().iter().zip(lambda_grid.weights()) {
            if exterior {
                let (mut j, mut y) = ([0.0], [0.0]);
                bessel_jy_ladder(order, lam, &mut j, &mut y)?;
                let a = j[0].hypot(y[0]);
                let (c, s) = if a.is_finite() { (y[0] / a, j[0] / a) } else { (-1.0, 0.0) };
                amplitude.push(a);
                phase.push((c, s));
                lambda_weights.push(w * lam);
            } else {
                amplitude.push(1.0);
                phase.push((0.0, 0.0));
                lambda_weights.push(w * lam.powi(dm1));
            }
        }
        let r_weights = r_grid
            .nodes()
            .iter()
            .zip(r_grid.weights())
            .map(|(&r, &w)| w * r.powi(dm1))
            .collect();

        let mut basis = Self {
            key,
            r_grid,
            lambda_grid,
            modes: Vec::new(),
            r_weights,
            lambda_weights,
            amplitude,
            phase,
        };
        let n = basis.r_grid.len() * basis.lambda_grid.len();
        let store = STORE.get_or_init(|| Mutex::new(None)).lock().expect("store lock").clone();
        if let Some(modes) = store.as_ref().and_then(|s| s.load(&key, n)) {
            basis.modes = modes;
            return Ok(basis);
        }
        let nr = basis.r_grid.len();
        let rows: Vec<Vec<f64>> = (0..basis.lambda_grid.len())
            .into_par_iter()
            .map(|i| {
                (0..nr)
                    .map(|j| basis.mode_value(i, basis.r_grid.nodes()[j], order, alpha))
                    .collect()
            })
            .collect();
        basis.modes = rows.concat();
        if let Some(s) = store {
            s.store(&key, &basis.modes);
        }
        Ok(basis)
    }

    fn mode_value(&self, i: usize, r: f64, order: BesselOrder, alpha: f64) -> f64 {
        let lam = self.lambda_grid.nodes()[i];
        let x = lam * r;
        let (mut j, mut y) = ([0.0], [0.0]);
        match self.key.kind {
            DomainKind::ExteriorBall => {
                if r <= 1.0 {
                    return 0.0;
                }
                if bessel_jy_ladder(order, x, &mut j, &mut y).is_err() {
                    return 0.0;
                }
                let (c, s) = self.phase[i];
                let cross = s * y[0];
                let cross = if cross.is_finite() { cross } else { 0.0 };
                let v = -r.powf(-alpha) * (j[0] * c - cross);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            }
            _ => {
                if x == 0.0 {
                    // (x/2)^α/Γ(α+1) · x^{−α} at x = 0.
                    return if self.key.ell == 0 {
                        2f64.powf(-alpha) / gamma_unchecked(alpha + 1.0)
                    } else {
                        0.0
                    };
                }
                if bessel_jy_ladder(order, x, &mut j, &mut y).is_err() {
                    return 0.0;
                }
                let v = x.powf(-alpha) * j[0];
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            }
        }
    }

    /// Every mode evaluated at an arbitrary radius.
    pub fn modes_at(&self, r: f64) -> Vec<f64> {
        let order = self.order();
        let alpha = (self.key.d as f64 - 2.0) / 2.0;
        (0..self.lambda_grid.len()).map(|i| self.mode_value(i, r, order, alpha)).collect()
    }

    fn order(&self) -> BesselOrder {
        BesselOrder::for_sector(self.key.d, self.key.ell).expect("validated sector")
    }

    pub fn key(&self) -> &BasisKey {
        &self.key
    }

    pub fn r_grid(&self) -> &Arc<PanelGrid> {
        &self.r_grid
    }

    pub fn lambda_grid(&self) -> &Arc<PanelGrid> {
        &self.lambda_grid
    }

    pub fn lambdas(&self) -> &[f64] {
        self.lambda_grid.nodes()
    }

    /// Quadrature weights of the spectral measure (including the density) at each λ node.
    pub fn lambda_weights(&self) -> &[f64] {
        &self.lambda_weights
    }

    /// Quadrature weights of r^{d−1} dr at each radial node.
    pub fn r_weights(&self) -> &[f64] {
        &self.r_weights
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    pub fn modes(&self) -> &[f64] {
        &self.modes
    }

    /// Coefficients ∫ f φ̃(·;λ_i) r^{d−1} dr from node values.
    pub fn forward(&self, values: &[f64]) -> Vec<f64> {
        let nr = self.r_grid.len();
        let weighted: Vec<f64> = values.iter().zip(&self.r_weights).map(|(v, w)| v * w).collect();
        self.modes
            .par_chunks(nr)
            .map(|row| row.iter().zip(&weighted).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Node values Σ_i c_i φ̃(r_j;λ_i) μ_i from coefficients.
    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        let nr = self.r_grid.len();
        let mut out = vec![0.0; nr];
        for (i, row) in self.modes.chunks(nr).enumerate() {
            let c = coeffs[i] * self.lambda_weights[i];
            if c == 0.0 {
                continue;
            }
            for (o, m) in out.iter_mut().zip(row) {
                *o += c * m;
            }
        }
        out
    }

    /// Inverse transform evaluated at one radius.
    pub fn inverse_at(&self, coeffs: &[f64], r: f64) -> f64 {
        self.modes_at(r)
            .iter()
            .zip(coeffs)
            .zip(&self.lambda_weights)
            .map(|((m, c), w)| m * c * w)
            .sum()
    }
}
