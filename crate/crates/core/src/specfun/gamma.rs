//! Gamma function via the Lanczos approximation (g = 7, nine terms).

use std::f64::consts::PI;

use crate::error::{invalid, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn lanczos_sum(z: f64) -> f64 {
    let mut acc = LANCZOS_COEFFS[0];
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    acc
}

/// Γ(x) for real `x` that is not a non-positive integer.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid(format!("gamma argument must be finite, got {x}")));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(invalid(format!("gamma has a pole at {x}")));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else if x > 171.7 {
        f64::INFINITY
    } else {
        let z = x - 1.0;
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((gamma_fn(1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert!((gamma_fn(5.0).unwrap() - 24.0).abs() < 1e-12);
        assert!((gamma_fn(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn recursion_oracle_at_7_3() {
        // Γ(7.3) = 6.3·5.3·4.3·3.3·2.3·1.3·0.3·Γ(0.3)
        let g03 = gamma_fn(0.3).unwrap();
        let prod: f64 = [6.3, 5.3, 4.3, 3.3, 2.3, 1.3, 0.3].iter().product();
        let direct = gamma_fn(7.3).unwrap();
        assert!(((direct - prod * g03) / direct).abs() < 1e-10);
    }

    #[test]
    fn relative_accuracy_against_factorials() {
        let mut fact = 1.0_f64;
        for n in 1..30 {
            if n > 1 {
                fact *= (n - 1) as f64;
            }
            let g = gamma_fn(n as f64).unwrap();
            assert!(((g - fact) / fact).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn poles_rejected() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-3.0).is_err());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.1, 0.7, 1.5, 3.2, 10.0, 25.5] {
            let a = ln_gamma(x).unwrap();
            let b = gamma_fn(x).unwrap().ln();
            assert!((a - b).abs() < 1e-12, "x = {x}");
        }
    }
}
