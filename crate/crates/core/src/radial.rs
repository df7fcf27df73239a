//! Radial functions f(r) tagged with a dimension d and angular sector ℓ.
//!
//! A function is either an analytic evaluator with a declared support and tail,
//! or node values on a [`PanelGrid`] (the output of spectral transforms).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::quadrature::PanelGrid;

pub type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Behaviour of f beyond the declared upper end of its support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// f vanishes beyond `hi`.
    Compact,
    /// |f(r)| ≲ exp(−(r − hi)²/scale²).
    Gaussian { scale: f64 },
    /// |f(r)| ~ r^{−q}.
    Power { q: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
    pub tail: Tail,
    /// Interior points where f changes scale; used as quadrature breaks.
    pub breaks: Vec<f64>,
}

impl Support {
    pub fn compact(lo: f64, hi: f64) -> Self {
        Self { lo, hi, tail: Tail::Compact, breaks: Vec::new() }
    }

    pub fn with_tail(lo: f64, hi: f64, tail: Tail) -> Self {
        Self { lo, hi, tail, breaks: Vec::new() }
    }

    pub fn with_breaks(mut self, breaks: Vec<f64>) -> Self {
        self.breaks = breaks;
        self
    }
}

#[derive(Clone)]
enum Repr {
    Analytic {
        re: Profile,
        im: Option<Profile>,
        support: Support,
    },
    Sampled {
        grid: Arc<PanelGrid>,
        re: Vec<f64>,
        im: Option<Vec<f64>>,
    },
}

#[derive(Clone)]
pub struct RadialFunction {
    d: u32,
    ell: u32,
    repr: Repr,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Analytic { support, .. } => format!("analytic on [{}, {}]", support.lo, support.hi),
            Repr::Sampled { grid, .. } => format!("sampled on {} nodes", grid.len()),
        };
        write!(f, "RadialFunction(d={}, ell={}, {kind})", self.d, self.ell)
    }
}

fn check_sector(d: u32) -> Result<()> {
    if d < 3 {
        return Err(invalid(format!("dimension must be at least 3, got {d}")));
    }
    Ok(())
}

impl RadialFunction {
    pub fn analytic(
        d: u32,
        ell: u32,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: Support,
    ) -> Result<Self> {
        check_sector(d)?;
        if !(support.lo >= 0.0 && support.lo < support.hi && support.hi.is_finite()) {
            return Err(invalid("support must satisfy 0 ≤ lo < hi < ∞"));
        }
        Ok(Self {
            d,
            ell,
            repr: Repr::Analytic { re: Arc::new(f), im: None, support },
        })
    }

    pub fn analytic_complex(
        d: u32,
        ell: u32,
        re: impl Fn(f64) -> f64 + Send + Sync + 'static,
        im: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support: Support,
    ) -> Result<Self> {
        let mut f = Self::analytic(d, ell, re, support)?;
        if let Repr::Analytic { im: slot, .. } = &mut f.repr {
            *slot = Some(Arc::new(im));
        }
        Ok(f)
    }

    pub fn sampled(
        d: u32,
        ell: u32,
        grid: Arc<PanelGrid>,
        re: Vec<f64>,
        im: Option<Vec<f64>>,
    ) -> Result<Self> {
        check_sector(d)?;
        if re.len() != grid.len() || im.as_ref().is_some_and(|v| v.len() != grid.len()) {
            return Err(invalid("sample count does not match the grid"));
        }
        if re.iter().chain(im.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(invalid("sampled values must be finite"));
        }
        Ok(Self { d, ell, repr: Repr::Sampled { grid, re, im } })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn is_complex(&self) -> bool {
        match &self.repr {
            Repr::Analytic { im, .. } => im.is_some(),
            Repr::Sampled { im, .. } => im.is_some(),
        }
    }

    pub fn grid(&self) -> Option<&Arc<PanelGrid>> {
        match &self.repr {
            Repr::Sampled { grid, .. } => Some(grid),
            Repr::Analytic { .. } => None,
        }
    }

    /// Node values of a sampled function: (real, imaginary).
    pub fn samples(&self) -> Option<(&[f64], Option<&[f64]>)> {
        match &self.repr {
            Repr::Sampled { re, im, .. } => Some((re, im.as_deref())),
            Repr::Analytic { .. } => None,
        }
    }

    /// Support, tail and quadrature breaks. Sampled functions vanish outside their grid.
    pub fn support(&self) -> Support {
        match &self.repr {
            Repr::Analytic { support, .. } => support.clone(),
            Repr::Sampled { grid, .. } => Support::compact(grid.lower(), grid.upper())
                .with_breaks(grid.breaks().to_vec()),
        }
    }

    /// Real part of f(r).
    pub fn eval(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Analytic { re, support, .. } => {
                if r < support.lo || (support.tail == Tail::Compact && r > support.hi) {
                    0.0
                } else {
                    re(r)
                }
            }
            Repr::Sampled { grid, re, .. } => grid.interpolate(re, r),
        }
    }

    pub fn eval_complex(&self, r: f64) -> Complex64 {
        let re = self.eval(r);
        let im = match &self.repr {
            Repr::Analytic { im: Some(im), support, .. } => {
                if r < support.lo || (support.tail == Tail::Compact && r > support.hi) {
                    0.0
                } else {
                    im(r)
                }
            }
            Repr::Sampled { grid, im: Some(im), .. } => grid.interpolate(im, r),
            _ => 0.0,
        };
        Complex64::new(re, im)
    }

    pub fn modulus(&self, r: f64) -> f64 {
        if self.is_complex() {
            self.eval_complex(r).norm()
        } else {
            self.eval(r).abs()
        }
    }

    /// Values at arbitrary points: (real, imaginary if complex).
    pub fn sample_at(&self, points: &[f64]) -> (Vec<f64>, Option<Vec<f64>>) {
        if self.is_complex() {
            let (re, im) = points.iter().map(|&r| {
                let z = self.eval_complex(r);
                (z.re, z.im)
            }).unzip();
            (re, Some(im))
        } else {
            (points.iter().map(|&r| self.eval(r)).collect(), None)
        }
    }

    /// c·f.
    pub fn scaled(&self, c: f64) -> Self {
        let repr = match &self.repr {
            Repr::Analytic { re, im, support } => {
                let re = re.clone();
                Repr::Analytic {
                    re: Arc::new(move |r| c * re(r)),
                    im: im.clone().map(|im| -> Profile { Arc::new(move |r| c * im(r)) }),
                    support: support.clone(),
                }
            }
            Repr::Sampled { grid, re, im } => Repr::Sampled {
                grid: grid.clone(),
                re: re.iter().map(|v| c * v).collect(),
                im: im.as_ref().map(|im| im.iter().map(|v| c * v).collect()),
            },
        };
        Self { d: self.d, ell: self.ell, repr }
    }

    /// Same profile viewed in another dimension/sector.
    pub fn with_sector(&self, d: u32, ell: u32) -> Result<Self> {
        check_sector(d)?;
        Ok(Self { d, ell, repr: self.repr.clone() })
    }

    /// Applies g to every node value of a real sampled function.
    pub fn map_samples(&self, g: impl Fn(f64) -> f64) -> Option<Self> {
        match &self.repr {
            Repr::Sampled { grid, re, im: None } => Some(Self {
                d: self.d,
                ell: self.ell,
                repr: Repr::Sampled {
                    grid: grid.clone(),
                    re: re.iter().map(|&v| g(v)).collect(),
                    im: None,
                },
            }),
            _ => None,
        }
    }
}

/// Smooth bump exp(−a z²/(1 − z²)), z = (r − center)/half_width, with peak value 1.
pub fn bump_profile(center: f64, half_width: f64, sharpness: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |r: f64| {
        let z = (r - center) / half_width;
        let z2 = z * z;
        if z2 >= 1.0 {
            0.0
        } else {
            (-sharpness * z2 / (1.0 - z2)).exp()
        }
    }
}
