//! Integrals over [a, ∞) for integrands with a declared decay class.

use super::adaptive::{integrate_breakpoints_lenient, IntegralResult, QuadOptions, Singular};
use crate::error::{invalid, Error, Result};

/// How the integrand decays at infinity; selects the truncation and change of variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// |f(x)| ≲ exp(−(x − a)²/σ²): truncated where the Gaussian falls below 1e-30.
    Gaussian { sigma: f64 },
    /// |f(x)| ≲ exp(−(x − a)/scale): truncated after 75 scale lengths.
    Exponential { scale: f64 },
    /// |f(x)| ~ C x^{−q}, q > 1: logarithmic substitution plus a power-law tail correction.
    Power { q: f64 },
    /// Oscillatory with damping that makes everything beyond λ_max negligible.
    OscillatoryDamped { lambda_max: f64 },
}

/// ∫_a^∞ f. The first unit of length is integrated with the x = a + u² substitution,
/// so an integrable power singularity at a is allowed.
pub fn integrate_semiinfinite(
    f: impl Fn(f64) -> f64,
    a: f64,
    tol: f64,
    decay: Decay,
) -> Result<IntegralResult> {
    integrate_semiinfinite_with(f, a, &QuadOptions::with_tol(tol), decay)
}

pub fn integrate_semiinfinite_with(
    f: impl Fn(f64) -> f64,
    a: f64,
    opts: &QuadOptions,
    decay: Decay,
) -> Result<IntegralResult> {
    if !a.is_finite() {
        return Err(invalid("lower limit must be finite"));
    }
    let fail = |res: IntegralResult| Error::NonConvergence {
        what: "semi-infinite quadrature".into(),
        estimate: res.value,
        error: res.abs_error_estimate,
    };
    match decay {
        Decay::Gaussian { sigma } | Decay::Exponential { scale: sigma } => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(invalid("decay scale must be positive"));
            }
            let length = match decay {
                Decay::Gaussian { .. } => sigma * 69f64.sqrt(),
                _ => 75.0 * sigma,
            };
            let mut points = vec![a];
            let first = sigma.min(1.0);
            // Dyadic breaks resolve the transition region without forcing many bisections.
            let mut x = first;
            while x < length {
                points.push(a + x);
                x *= 2.0;
            }
            points.push(a + length);
            let opts = opts.clone().singular(Singular::Lower);
            let (res, ok) = integrate_breakpoints_lenient(&f, &points, &opts)?;
            if ok {
                Ok(res)
            } else {
                Err(fail(res))
            }
        }
        Decay::OscillatoryDamped { lambda_max } => {
            if !(lambda_max > a) {
                return Err(invalid("lambda_max must exceed the lower limit"));
            }
            let n = ((lambda_max - a) / std::f64::consts::PI).ceil().max(1.0) as usize;
            let h = (lambda_max - a) / n as f64;
            let points: Vec<f64> = (0..=n).map(|i| a + i as f64 * h).collect();
            let opts = opts.clone().singular(Singular::Lower);
            let (res, ok) = integrate_breakpoints_lenient(&f, &points, &opts)?;
            if ok {
                Ok(res)
            } else {
                Err(fail(res))
            }
        }
        Decay::Power { q } => power_tail(&f, a, opts, q),
    }
}

/// [a, a+1] directly, then x = a + e^v on v ≥ 0 in unit chunks until the
/// remaining power-law tail f(X)·(X − a)/(q − 1) is below tolerance; that tail is added.
fn power_tail(f: &dyn Fn(f64) -> f64, a: f64, opts: &QuadOptions, q: f64) -> Result<IntegralResult> {
    if !(q > 1.0) {
        return Err(invalid("power decay needs q > 1 for integrability"));
    }
    let head_opts = opts.clone().singular(Singular::Lower);
    let (head, ok) = integrate_breakpoints_lenient(f, &[a, a + 1.0], &head_opts)?;
    if !ok {
        return Err(Error::NonConvergence {
            what: "semi-infinite quadrature (near field)".into(),
            estimate: head.value,
            error: head.abs_error_estimate,
        });
    }
    let mapped = |v: f64| {
        let e = v.exp();
        f(a + e) * e
    };
    let mut value = head.value;
    let mut error = head.abs_error_estimate;
    let mut evaluations = head.evaluations;
    let mut v = 0.0;
    let v_max = 700.0;
    loop {
        // Far chunks are small; they are judged against the running total, not themselves.
        let chunk_opts = opts
            .clone()
            .singular(Singular::None)
            .abs(opts.abs_tol.max(0.1 * opts.rel_tol * value.abs()));
        let (chunk, ok) = integrate_breakpoints_lenient(mapped, &[v, v + 2.0], &chunk_opts)?;
        value += chunk.value;
        error += chunk.abs_error_estimate;
        evaluations += chunk.evaluations;
        v += 2.0;
        let x = v.exp();
        let tail = f(a + x) * x / (q - 1.0);
        let done = tail.abs() <= (opts.rel_tol * value.abs()).max(opts.abs_tol);
        if !ok || evaluations > opts.budget || v >= v_max {
            return Err(Error::NonConvergence {
                what: "semi-infinite quadrature (power tail)".into(),
                estimate: value + tail,
                error: error + tail.abs(),
            });
        }
        if done {
            return Ok(IntegralResult {
                value: value + tail,
                abs_error_estimate: error + 0.5 * tail.abs(),
                evaluations,
            });
        }
    }
}
