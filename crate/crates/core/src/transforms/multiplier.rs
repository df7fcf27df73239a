//! Spectral multipliers m(λ) and their Mikhlin-type derivative bounds.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

type Symbol = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub struct Multiplier {
    name: String,
    symbol: Symbol,
    real: bool,
}

impl std::fmt::Debug for Multiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Multiplier({})", self.name)
    }
}

/// sup_λ |λ^k ∂^k m(λ)| over a grid, for k = 0..=k_max.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MikhlinReport {
    pub constants: Vec<f64>,
    /// Number of leading k whose constant is finite and at most the requested bound.
    pub mikhlin_order: usize,
}

impl Multiplier {
    pub fn real(name: impl Into<String>, m: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            symbol: Arc::new(move |l| Complex64::new(m(l), 0.0)),
            real: true,
        }
    }

    pub fn complex(
        name: impl Into<String>,
        m: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), symbol: Arc::new(m), real: false }
    }

    pub fn identity() -> Self {
        Self::real("1", |_| 1.0)
    }

    /// λ^s; negative s gives the Riesz potentials.
    pub fn power(s: f64) -> Self {
        Self::real(format!("lambda^{s}"), move |l| if s == 0.0 { 1.0 } else { l.powf(s) })
    }

    /// e^{−tλ²}, the heat semigroup.
    pub fn heat(t: f64) -> Self {
        Self::real(format!("exp(-{t} lambda^2)"), move |l| (-t * l * l).exp())
    }

    /// λ^{iτ}, the imaginary powers.
    pub fn imaginary_power(tau: f64) -> Self {
        Self::complex(format!("lambda^(i {tau})"), move |l| {
            Complex64::from_polar(1.0, tau * l.ln())
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn eval(&self, lambda: f64) -> Complex64 {
        (self.symbol)(lambda)
    }

    pub fn product(&self, other: &Multiplier) -> Multiplier {
        let (a, b) = (self.symbol.clone(), other.symbol.clone());
        Self {
            name: format!("({})*({})", self.name, other.name),
            symbol: Arc::new(move |l| a(l) * b(l)),
            real: self.real && other.real,
        }
    }

    /// Derivative bounds by finite differences in log λ: with L = λ∂_λ, the quantities
    /// λ^k ∂^k m are fixed combinations of L^j m, j ≤ k.
    pub fn mikhlin(&self, lambdas: &[f64], k_max: usize, bound: f64) -> MikhlinReport {
        let h = 1e-2;
        let mut constants = vec![0.0f64; k_max + 1];
        for &l in lambdas.iter().filter(|l| **l > 0.0) {
            // Samples of m(λ e^{ih}) for i = −k_max..=k_max.
            let samples: Vec<Complex64> = (-(k_max as i32)..=k_max as i32)
                .map(|i| self.eval(l * (i as f64 * h).exp()))
                .collect();
            let mut lk = vec![Complex64::new(0.0, 0.0); k_max + 1];
            lk[0] = samples[k_max];
            for (k, slot) in lk.iter_mut().enumerate().skip(1) {
                *slot = central_difference(&samples, k_max, k, h);
            }
            // λ^k ∂^k = L(L−1)…(L−k+1).
            for k in 0..=k_max {
                let mut poly = vec![1.0];
                for j in 0..k {
                    let mut next = vec![0.0; poly.len() + 1];
                    for (i, c) in poly.iter().enumerate() {
                        next[i + 1] += c;
                        next[i] -= j as f64 * c;
                    }
                    poly = next;
                }
                let v: Complex64 = poly.iter().enumerate().map(|(i, c)| lk[i] * *c).sum();
                constants[k] = constants[k].max(v.norm());
            }
        }
        let mikhlin_order = constants.iter().take_while(|c| c.is_finite() && **c <= bound).count();
        MikhlinReport { constants, mikhlin_order }
    }
}

/// k-th derivative at the centre of equally spaced samples (spacing h), second order.
fn central_difference(samples: &[Complex64], centre: usize, k: usize, h: f64) -> Complex64 {
    // Repeated first differences on the half-step lattice: Δ^k f / h^k centred.
    let mut cur: Vec<Complex64> = samples.to_vec();
    for _ in 0..k {
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
    }
    // After k differences the entry centred at `centre` sits at index centre − k/2.
    let v = if k.is_multiple_of(2) {
        cur[centre - k / 2]
    } else {
        0.5 * (cur[centre - k.div_ceil(2)] + cur[centre - (k - 1) / 2])
    };
    v / h.powi(k as i32)
}
