//! Schur-test weights and their admissibility windows.

use serde::Serialize;

use crate::domain::OBSTACLE_DIAMETER;
use crate::error::{invalid, Error, Result};

/// |x|, |y| and |x − y| for a pair of points; every kernel and weight used here is
/// rotation invariant and depends on these three numbers only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub x: f64,
    pub y: f64,
    pub dist: f64,
}

/// Distance to the unit sphere, used as d(·) on both sides of the obstacle.
pub fn boundary_distance(r: f64) -> f64 {
    (r - 1.0).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WeightFamily {
    /// w = 1.
    Unit,
    /// (d(x)/|x−y|)^α.
    DistRatio,
    /// (|x|/|y|)^α.
    RadiusRatio,
    /// diam^{α₁} d(x)^{α₂} / |y|^{α₁+α₂}.
    Mixed,
    /// (d(x)/d(y))^α.
    DistDist,
    /// (d(x)/|y|)^α.
    DistRadius,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightSpec {
    pub family: WeightFamily,
    /// Total exponent; α₁ + α₂ for the mixed family.
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Open interval of admissible α.
    pub window: (f64, f64),
}

/// Windows narrower than this (relative) count as empty, so that endpoint cases such as
/// s = 1 + 1/p are classified exactly despite rounding.
const WINDOW_SLACK: f64 = 1e-12;

fn nonempty(w: (f64, f64)) -> bool {
    if w.0.is_infinite() || w.1.is_infinite() {
        return w.0 < w.1;
    }
    w.1 - w.0 > WINDOW_SLACK * (1.0 + w.0.abs() + w.1.abs())
}

impl WeightSpec {
    pub fn unit() -> Self {
        Self {
            family: WeightFamily::Unit,
            alpha: 0.0,
            alpha1: 0.0,
            alpha2: 0.0,
            window: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// A one-exponent family with an explicit α; the window is left unrestricted.
    pub fn new(family: WeightFamily, alpha: f64) -> Self {
        Self { family, alpha, alpha1: 0.0, alpha2: alpha, window: (f64::NEG_INFINITY, f64::INFINITY) }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        if self.family == WeightFamily::Mixed {
            // Keep α₁ and move the whole change into α₂.
            self.alpha2 = alpha - self.alpha1;
        } else {
            self.alpha2 = alpha;
        }
        self.alpha = alpha;
        self
    }

    pub fn window_nonempty(&self) -> bool {
        nonempty(self.window)
    }

    pub fn admissible(&self) -> bool {
        self.window_nonempty() && self.window.0 < self.alpha && self.alpha < self.window.1
    }

    pub fn eval(&self, q: Pair) -> f64 {
        let dx = boundary_distance(q.x);
        match self.family {
            WeightFamily::Unit => 1.0,
            WeightFamily::DistRatio => (dx / q.dist).powf(self.alpha),
            WeightFamily::RadiusRatio => (q.x / q.y).powf(self.alpha),
            WeightFamily::Mixed => {
                OBSTACLE_DIAMETER.powf(self.alpha1) * dx.powf(self.alpha2) / q.y.powf(self.alpha)
            }
            WeightFamily::DistDist => (dx / boundary_distance(q.y)).powf(self.alpha),
            WeightFamily::DistRadius => (dx / q.y).powf(self.alpha),
        }
    }
}

/// Pieces of Ω × Ω (and ℝ^d × Ω for the square-function difference kernel) on which the
/// Dirichlet Hardy inequality is proved with a separate weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    Ia,
    Ib,
    Ic,
    Id,
    IIa,
    IIb,
    IIc,
    IId,
    /// The kernel d(y)^s [d(x)² + d(y)² + |x−y|²]^{−(d+s)/2}.
    P62,
}

impl Region {
    pub const ALL: [Region; 9] =
        [Region::Ia, Region::Ib, Region::Ic, Region::Id, Region::IIa, Region::IIb, Region::IIc, Region::IId, Region::P62];
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// The weight used on `region`, with α at the midpoint of its window.
/// An empty window is reported as [`Error::EmptyWindow`].
pub fn region_weight(region: Region, p: f64, s: f64, d: u32) -> Result<WeightSpec> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(invalid(format!("exponent p must lie in (1, ∞), got {p}")));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(format!("smoothness s must be non-negative, got {s}")));
    }
    let pp = conjugate(p);
    let d = d as f64;
    let (family, window) = match region {
        Region::Ia | Region::Ib => return Ok(WeightSpec::unit()),
        Region::Ic | Region::Id => (WeightFamily::DistRatio, (p * (s - 1.0), pp * (2.0 - s))),
        Region::IIa | Region::IIb => (WeightFamily::RadiusRatio, (p * s, (pp * (d - s)).min(p * d))),
        Region::IIc => {
            // α₁ < p and α₂ < p′(2 − s) cap the total at p + p′(2 − s).
            (WeightFamily::Mixed, (p * s, (pp * (d - s)).min(p + pp * (2.0 - s))))
        }
        Region::IId => (WeightFamily::DistRadius, (p * (s - 1.0), pp * (2.0 - s))),
        Region::P62 => (WeightFamily::DistDist, (0.0, pp.min(p * s))),
    };
    if !nonempty(window) {
        return Err(Error::EmptyWindow(format!(
            "{region:?} at p = {p}, s = {s}, d = {d}: ({}, {})",
            window.0, window.1
        )));
    }
    let alpha = 0.5 * (window.0 + window.1);
    let (alpha1, alpha2) = if family == WeightFamily::Mixed {
        // Equal slack below both caps.
        let slack = 0.5 * (p + pp * (2.0 - s) - alpha);
        (p - slack, pp * (2.0 - s) - slack)
    } else {
        (0.0, alpha)
    };
    Ok(WeightSpec { family, alpha, alpha1, alpha2, window })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_ratio_window_arithmetic() {
        let w = region_weight(Region::IIa, 2.0, 1.0, 3).unwrap();
        assert_eq!(w.window, (2.0, 4.0));
        assert_eq!(w.alpha, 3.0);
        assert!(w.admissible());
    }

    #[test]
    fn square_function_difference_window() {
        let w = region_weight(Region::P62, 2.0, 1.0, 3).unwrap();
        assert_eq!(w.window, (0.0, 2.0));
    }

    #[test]
    fn mixed_split_respects_caps() {
        for (p, s) in [(2.0, 1.0), (1.5, 0.5), (4.0, 0.3)] {
            let w = region_weight(Region::IIc, p, s, 3).unwrap();
            assert!(w.alpha1 < p && w.alpha2 < conjugate(p) * (2.0 - s));
            assert!((w.alpha1 + w.alpha2 - w.alpha).abs() < 1e-12);
            assert!(w.admissible());
        }
    }

    #[test]
    fn empty_window_is_an_error() {
        let p: f64 = 2.0;
        let s = 1.0 + 1.0 / p;
        assert!(matches!(region_weight(Region::Ic, p, s, 3), Err(Error::EmptyWindow(_))));
        assert!(region_weight(Region::Ic, p, s - 1e-6, 3).is_ok());
    }

    #[test]
    fn weight_values() {
        let q = Pair { x: 3.0, y: 2.0, dist: 4.0 };
        assert_eq!(WeightSpec::new(WeightFamily::DistRatio, 1.0).eval(q), 0.5);
        assert_eq!(WeightSpec::new(WeightFamily::RadiusRatio, 1.0).eval(q), 1.5);
        assert_eq!(WeightSpec::new(WeightFamily::DistDist, 1.0).eval(q), 2.0);
        assert_eq!(WeightSpec::new(WeightFamily::DistRadius, 2.0).eval(q), 1.0);
        assert_eq!(WeightSpec::unit().eval(q), 1.0);
        assert!(WeightSpec::unit().admissible());
    }
}
