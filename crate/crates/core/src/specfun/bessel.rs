//! Bessel functions J_ν and Y_ν of real order ν ≥ 0 and positive argument.
//!
//! Every order is reached from a base pair of orders by three-term recurrence.
//! Half-integer orders start from the closed forms of J_{±1/2}, Y_{±1/2};
//! any other order ν = μ + n with μ ∈ [0, 1) starts from (μ, μ + 1), whose values
//! come from one of three regimes:
//!
//! * `x ≤ 6`: ascending power series (Neumann series for integer Y, reflection
//!   or the Schläfli integral for fractional Y),
//! * `6 < x < 25`: Schläfli integral representations on a fixed composite Gauss rule,
//! * `x ≥ 25`: Hankel asymptotic expansion, truncated at its smallest term.
//!
//! Y always recurs upward. J recurs upward when x ≥ ν and otherwise uses Miller's
//! downward recurrence normalized against the base pair.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{ensure_finite, invalid, Result};
use crate::quadrature::rules::gl16_composite;
use crate::specfun::gamma::{gamma_unchecked, EULER_GAMMA};

const SERIES_MAX: f64 = 6.0;
const ASYMPTOTIC_MIN: f64 = 25.0;

/// A non-negative real Bessel order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        ensure_finite("order", nu)?;
        if nu < 0.0 {
            return Err(invalid(format!("order must be non-negative, got {nu}")));
        }
        Ok(Self { nu })
    }

    /// Order (d − 2)/2 + ℓ of the radial reduction in sector ℓ of ℝ^d.
    pub fn for_sector(d: u32, ell: u32) -> Result<Self> {
        if d < 3 {
            return Err(invalid(format!("dimension must be at least 3, got {d}")));
        }
        Self::new((d as f64 - 2.0) / 2.0 + ell as f64)
    }

    pub fn nu(self) -> f64 {
        self.nu
    }

    pub fn is_half_integer(self) -> bool {
        let twice = 2.0 * self.nu;
        twice == twice.round() && (twice as i64) % 2 == 1
    }

    pub fn shifted(self, k: u32) -> Self {
        Self { nu: self.nu + k as f64 }
    }
}

/// Which base pair the recurrences start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    /// Closed forms for half-integer orders, regime-selected bases otherwise.
    #[default]
    Auto,
    /// Always the regime-selected bases; exists so the two paths can be compared.
    General,
}

pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    ensure_finite("argument", x)?;
    if x < 0.0 {
        return Err(invalid(format!("argument must be non-negative, got {x}")));
    }
    if x == 0.0 {
        return Ok(if order.nu == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(bessel_jy_with(order, x, Evaluation::Auto)?.0)
}

pub fn bessel_y(order: BesselOrder, x: f64) -> Result<f64> {
    Ok(bessel_jy(order, x)?.1)
}

/// (J_ν(x), Y_ν(x)).
pub fn bessel_jy(order: BesselOrder, x: f64) -> Result<(f64, f64)> {
    bessel_jy_with(order, x, Evaluation::Auto)
}

pub fn bessel_jy_with(order: BesselOrder, x: f64, path: Evaluation) -> Result<(f64, f64)> {
    let mut j = [0.0];
    let mut y = [0.0];
    bessel_jy_ladder_with(order, x, path, &mut j, &mut y)?;
    Ok((j[0], y[0]))
}

/// Fills `j[k]`, `y[k]` with J and Y of order ν + k for k = 0..len.
pub fn bessel_jy_ladder(order: BesselOrder, x: f64, j: &mut [f64], y: &mut [f64]) -> Result<()> {
    bessel_jy_ladder_with(order, x, Evaluation::Auto, j, y)
}

pub fn bessel_jy_ladder_with(
    order: BesselOrder,
    x: f64,
    path: Evaluation,
    j: &mut [f64],
    y: &mut [f64],
) -> Result<()> {
    ensure_finite("argument", x)?;
    if x <= 0.0 {
        return Err(invalid(format!("argument must be positive, got {x}")));
    }
    if j.len() != y.len() {
        return Err(invalid("ladder buffers differ in length"));
    }
    if j.is_empty() {
        return Ok(());
    }
    let closed = path == Evaluation::Auto && order.is_half_integer();
    let (mu0, base) = if closed {
        (-0.5, half_integer_base(x))
    } else {
        let mu = order.nu.fract();
        (mu, general_base(mu, x))
    };
    let offset = (order.nu - mu0).round() as usize;
    ladder(mu0, base, x, offset, j, y);
    Ok(())
}

/// J and Y at orders μ and μ + 1: `[J_μ, J_{μ+1}, Y_μ, Y_{μ+1}]`.
type Base = [f64; 4];

fn half_integer_base(x: f64) -> Base {
    let s = (2.0 / (PI * x)).sqrt();
    let (sin, cos) = x.sin_cos();
    [s * cos, s * sin, s * sin, -s * cos]
}

fn ladder(mu0: f64, base: Base, x: f64, offset: usize, j: &mut [f64], y: &mut [f64]) {
    let kmax = offset + j.len() - 1;
    let [j0, j1, y0, y1] = base;

    // Y: upward recurrence is stable for every order.
    let (mut ya, mut yb) = (y0, y1);
    for k in 0..=kmax {
        let yk = match k {
            0 => y0,
            1 => y1,
            _ => {
                let next = 2.0 * (mu0 + (k - 1) as f64) / x * yb - ya;
                ya = yb;
                yb = next;
                next
            }
        };
        if k >= offset {
            y[k - offset] = yk;
        }
    }

    if x >= mu0 + kmax as f64 || kmax <= 1 {
        let (mut ja, mut jb) = (j0, j1);
        for k in 0..=kmax {
            let jk = match k {
                0 => j0,
                1 => j1,
                _ => {
                    let next = 2.0 * (mu0 + (k - 1) as f64) / x * jb - ja;
                    ja = jb;
                    jb = next;
                    next
                }
            };
            if k >= offset {
                j[k - offset] = jk;
            }
        }
        return;
    }

    // Miller: recur downward from far above the turning point, then normalize.
    let start = kmax + 16 + (40.0 * (kmax as f64 + 1.0)).sqrt() as usize + x as usize;
    let mut upper = 0.0;
    let mut cur = 1e-30;
    let (mut b0, mut b1) = (0.0, 0.0);
    for k in (1..=start).rev() {
        let lower = 2.0 * (mu0 + k as f64) / x * cur - upper;
        upper = cur;
        cur = lower;
        // `upper` now holds order k, `cur` order k − 1.
        if cur.abs() > 1e250 {
            let scale = 1e-250;
            cur *= scale;
            upper *= scale;
            for v in j.iter_mut() {
                *v *= scale;
            }
        }
        if k <= kmax && k >= offset {
            j[k - offset] = upper;
        }
        if k == 1 {
            b1 = upper;
            b0 = cur;
        }
    }
    if offset == 0 {
        j[0] = b0;
    }
    let m = b0.abs().max(b1.abs());
    let (c0, c1) = (b0 / m, b1 / m);
    let scale = (j0 * c0 + j1 * c1) / (c0 * c0 + c1 * c1) / m;
    for v in j.iter_mut() {
        *v *= scale;
    }
}

fn general_base(mu: f64, x: f64) -> Base {
    if x >= ASYMPTOTIC_MIN {
        let (ja, ya) = hankel_asymptotic(mu, x);
        let (jb, yb) = hankel_asymptotic(mu + 1.0, x);
        return [ja, jb, ya, yb];
    }
    if x > SERIES_MAX {
        let (ja, ya) = schlafli(mu, x);
        let (jb, yb) = schlafli(mu + 1.0, x);
        return [ja, jb, ya, yb];
    }
    let ja = j_series(mu, x);
    let jb = j_series(mu + 1.0, x);
    if mu == 0.0 {
        let (y0, y1) = neumann_y01(x);
        return [ja, jb, y0, y1];
    }
    let (sin, cos) = (mu * PI).sin_cos();
    if sin > 0.5 {
        // Y_ν = (J_ν cos νπ − J_{−ν}) / sin νπ, with sin, cos flipping sign at ν + 1.
        let ya = (ja * cos - j_series(-mu, x)) / sin;
        let yb = (jb * cos + j_series(-mu - 1.0, x)) / sin;
        return [ja, jb, ya, yb];
    }
    [ja, jb, schlafli(mu, x).1, schlafli(mu + 1.0, x).1]
}

/// Ascending series Σ (−x²/4)^k (x/2)^ν / (k! Γ(k + ν + 1)); ν may be negative non-integer.
fn j_series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = (0.5 * x).powf(nu) / gamma_unchecked(nu + 1.0);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && kf > 0.5 * x {
            break;
        }
    }
    sum
}

fn neumann_y01(x: f64) -> (f64, f64) {
    let half = 0.5 * x;
    let log_term = half.ln() + EULER_GAMMA;
    let q = half * half;

    let j0 = j_series(0.0, x);
    let j1 = j_series(1.0, x);

    // Σ_{k≥1} (−1)^{k+1} H_k q^k / (k!)².
    let mut s0 = 0.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        harmonic += 1.0 / kf;
        let add = -term * harmonic;
        s0 += add;
        if add.abs() < 1e-17 * s0.abs() && kf > half {
            break;
        }
    }
    let y0 = FRAC_2_PI * (log_term * j0 + s0);

    // Σ_{k≥0} (−1)^k (ψ(k+1) + ψ(k+2)) (x/2)^{2k+1} / (k!(k+1)!), ψ(n+1) = −γ + H_n.
    let mut s1 = 0.0;
    let mut term = half;
    let mut h_k = 0.0;
    for k in 0..200 {
        let kf = k as f64;
        if k > 0 {
            term *= -q / (kf * (kf + 1.0));
            h_k += 1.0 / kf;
        }
        let h_k1 = h_k + 1.0 / (kf + 1.0);
        let add = term * (h_k + h_k1 - 2.0 * EULER_GAMMA);
        s1 += add;
        if k > 0 && add.abs() < 1e-17 * s1.abs() && kf > half {
            break;
        }
    }
    let y1 = -FRAC_2_PI / x + FRAC_2_PI * half.ln() * j1 - s1 / PI;
    (y0, y1)
}

/// Schläfli integral representations of J_ν and Y_ν for x > 0.
fn schlafli(nu: f64, x: f64) -> (f64, f64) {
    let (sin_nu, cos_nu) = (nu * PI).sin_cos();
    let jt = gl16_composite(|th| (nu * th - x * th.sin()).cos(), 0.0, PI, 8) / PI;
    let yt = gl16_composite(|th| (x * th.sin() - nu * th).sin(), 0.0, PI, 8) / PI;

    let tmax = (60.0 / x).asinh() + 0.5 + if x < SERIES_MAX { 2.0 } else { 0.0 };
    let panels = if x < SERIES_MAX { 32 } else { 12 };
    let jtail = if sin_nu == 0.0 {
        0.0
    } else {
        gl16_composite(|t| (-x * t.sinh() - nu * t).exp(), 0.0, tmax, panels)
    };
    let ytail = gl16_composite(
        |t| {
            let e = (-x * t.sinh()).exp();
            ((nu * t).exp() + (-nu * t).exp() * cos_nu) * e
        },
        0.0,
        tmax,
        panels,
    );
    (jt - sin_nu / PI * jtail, yt - ytail / PI)
}

fn hankel_asymptotic(nu: f64, x: f64) -> (f64, f64) {
    let mu4 = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..=60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (mu4 - odd * odd) / (8.0 * kf * x);
        let mag = a.abs();
        if mag > last || mag < 1e-17 {
            break;
        }
        last = mag;
        // a_k x^{−k} enters Q for odd k and P for even k, with alternating signs.
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
    }
    let omega = x - (0.5 * nu + 0.25) * PI;
    let (sin, cos) = omega.sin_cos();
    let s = (2.0 / (PI * x)).sqrt();
    (s * (p * cos - q * sin), s * (p * sin + q * cos))
}
