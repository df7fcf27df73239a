//! Report records shared by every experiment.

use serde::Serialize;

/// Evidence that a weighted integral diverges at a singular point σ:
/// partial integrals over [σ + δ, ·] for dyadic δ and the fitted growth exponent κ
/// in I(δ) ~ δ^{−κ}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Divergence {
    pub singular_point: f64,
    pub slope: f64,
    pub partials: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub tag: String,
    pub p: f64,
    pub s: f64,
    pub value: f64,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<Divergence>,
    /// Constituent norms of a ratio report.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<NormReport>,
}

impl NormReport {
    pub fn new(tag: impl Into<String>, p: f64, s: f64, value: f64, error: f64) -> Self {
        Self { tag: tag.into(), p, s, value, error, divergence: None, parts: Vec::new() }
    }

    pub fn is_divergent(&self) -> bool {
        self.divergence.is_some()
    }

    /// num/den with first-order error propagation; divergent parts give an infinite ratio.
    pub fn ratio(tag: impl Into<String>, num: NormReport, den: NormReport) -> Self {
        let (value, error) = if num.is_divergent() {
            (f64::INFINITY, f64::INFINITY)
        } else if den.is_divergent() {
            (0.0, 0.0)
        } else if den.value == 0.0 {
            (if num.value == 0.0 { 1.0 } else { f64::INFINITY }, f64::INFINITY)
        } else {
            let v = num.value / den.value;
            let rel = num.error / num.value.abs().max(f64::MIN_POSITIVE) + den.error / den.value.abs();
            (v, v.abs() * rel)
        };
        Self {
            tag: tag.into(),
            p: num.p,
            s: num.s,
            value,
            error,
            divergence: None,
            parts: vec![num, den],
        }
    }
}
