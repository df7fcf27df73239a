//! Envelope and slope fits used to summarize sampled inequalities.

use serde::Serialize;

/// C·exp(−c z) bounding samples q(z) from one side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianEnvelope {
    pub c: f64,
    pub constant: f64,
}

impl GaussianEnvelope {
    pub fn eval(&self, z: f64) -> f64 {
        self.constant * (-self.c * z).exp()
    }
}

/// Decay rates searched by the envelope fits.
pub const DEFAULT_RATE_RANGE: (f64, f64) = (1e-4, 20.0);

/// Tightest upper envelope q_i ≤ C e^{−c z_i}: minimizes the mean log-gap over c in
/// `range`, with C the smallest constant valid for that c. Samples with q ≤ 0 are
/// ignored; returns None if none remain.
pub fn fit_upper(z: &[f64], q: &[f64], range: (f64, f64)) -> Option<GaussianEnvelope> {
    fit(z, q, range, true)
}

/// Tightest lower envelope q_i ≥ C e^{−c z_i}; see [`fit_upper`].
pub fn fit_lower(z: &[f64], q: &[f64], range: (f64, f64)) -> Option<GaussianEnvelope> {
    fit(z, q, range, false)
}

fn fit(z: &[f64], q: &[f64], range: (f64, f64), upper: bool) -> Option<GaussianEnvelope> {
    let pts: Vec<(f64, f64)> = z
        .iter()
        .zip(q)
        .filter(|(z, q)| z.is_finite() && q.is_finite() && **q > 0.0)
        .map(|(&z, &q)| (z, q.ln()))
        .collect();
    if pts.is_empty() {
        return None;
    }
    let zsum: f64 = pts.iter().map(|p| p.0).sum();
    let n = pts.len() as f64;
    let log_constant = |c: f64| {
        let it = pts.iter().map(|(z, lq)| lq + c * z);
        if upper {
            it.fold(f64::NEG_INFINITY, f64::max)
        } else {
            it.fold(f64::INFINITY, f64::min)
        }
    };
    // Mean gap between the envelope and the samples; convex in c for both sides.
    let gap = |c: f64| {
        let g = log_constant(c) - c * zsum / n;
        if upper {
            g
        } else {
            -g
        }
    };
    let (mut a, mut b) = range;
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if gap(m1) <= gap(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let c = 0.5 * (a + b);
    Some(GaussianEnvelope { c, constant: log_constant(c).exp() })
}

/// Least-squares line y = slope·x + intercept.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_exponential() {
        let z: Vec<f64> = (0..40).map(|i| i as f64 * 0.5).collect();
        let q: Vec<f64> = z.iter().map(|z| 3.0 * (-0.25 * z).exp()).collect();
        let up = fit_upper(&z, &q, DEFAULT_RATE_RANGE).unwrap();
        let lo = fit_lower(&z, &q, DEFAULT_RATE_RANGE).unwrap();
        for e in [up, lo] {
            assert!((e.c - 0.25).abs() < 1e-6, "{e:?}");
            assert!((e.constant - 3.0).abs() < 1e-5, "{e:?}");
        }
    }

    #[test]
    fn envelopes_bound_noisy_samples() {
        let z: Vec<f64> = (0..50).map(|i| i as f64 * 0.3).collect();
        let q: Vec<f64> = z
            .iter()
            .enumerate()
            .map(|(i, z)| (1.0 + 0.5 * ((i * 7 % 5) as f64 / 5.0)) * (-0.4 * z).exp())
            .collect();
        let up = fit_upper(&z, &q, DEFAULT_RATE_RANGE).unwrap();
        let lo = fit_lower(&z, &q, DEFAULT_RATE_RANGE).unwrap();
        for (z, q) in z.iter().zip(&q) {
            assert!(*q <= up.eval(*z) * (1.0 + 1e-12));
            assert!(*q >= lo.eval(*z) * (1.0 - 1e-12));
        }
    }

    #[test]
    fn line_fit() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 2.0 * i as f64 - 1.0)).collect();
        let (m, b) = linear_fit(&pts).unwrap();
        assert!((m - 2.0).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
    }
}
