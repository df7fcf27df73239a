//! The fixed test family: twelve radial bumps (three widths × two centers × two
//! modulations) whose jittered parameters are drawn once from a seeded generator and
//! stored in `data/bump_family.csv`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::radial::{bump_profile, RadialFunction, Support};

pub const FAMILY_SEED: u64 = 0x5eed_2024;
pub const SHARPNESS: f64 = 12.0;
const CENTERS: [f64; 2] = [2.0, 3.2];
const HALF_WIDTHS: [f64; 3] = [0.5, 0.7, 0.9];

const STORED: &str = include_str!("../data/bump_family.csv");

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BumpParams {
    pub index: usize,
    pub center: f64,
    pub half_width: f64,
    pub sharpness: f64,
    /// Modulation frequency κ of cos(κ(r − center)); 0 for the unmodulated bumps.
    pub kappa: f64,
}

impl BumpParams {
    pub fn profile(&self) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
        let bump = bump_profile(self.center, self.half_width, self.sharpness);
        let (c, k) = (self.center, self.kappa);
        move |r| bump(r) * (k * (r - c)).cos()
    }

    pub fn support(&self) -> Support {
        Support::compact(self.center - self.half_width, self.center + self.half_width)
            .with_breaks(vec![self.center])
    }

    pub fn function(&self, d: u32) -> Result<RadialFunction> {
        RadialFunction::analytic(d, 0, self.profile(), self.support())
    }
}

/// Draws the family parameters from the fixed seed.
pub fn generate() -> Vec<BumpParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(FAMILY_SEED);
    let mut out = Vec::with_capacity(12);
    for (ci, &c) in CENTERS.iter().enumerate() {
        for (wi, &h) in HALF_WIDTHS.iter().enumerate() {
            for modulated in [false, true] {
                let center = c + rng.gen_range(-0.05..0.05);
                let half_width = h + rng.gen_range(-0.03..0.03);
                let kappa = if modulated { rng.gen_range(3.0..6.0) } else { 0.0 };
                out.push(BumpParams {
                    index: ci * 6 + wi * 2 + modulated as usize,
                    center: round6(center),
                    half_width: round6(half_width),
                    sharpness: SHARPNESS,
                    kappa: round6(kappa),
                });
            }
        }
    }
    out
}

fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

pub fn to_csv(params: &[BumpParams]) -> String {
    let mut s = String::from("index,center,half_width,sharpness,kappa\n");
    for p in params {
        s.push_str(&format!(
            "{},{:.6},{:.6},{:.1},{:.6}\n",
            p.index, p.center, p.half_width, p.sharpness, p.kappa
        ));
    }
    s
}

/// The stored family.
pub fn bump_family() -> Vec<BumpParams> {
    STORED
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.trim().parse().expect("numeric field")).collect();
            BumpParams {
                index: v[0] as usize,
                center: v[1],
                half_width: v[2],
                sharpness: v[3],
                kappa: v[4],
            }
        })
        .collect()
}

pub fn family_functions(d: u32) -> Result<Vec<RadialFunction>> {
    bump_family().iter().map(|p| p.function(d)).collect()
}
