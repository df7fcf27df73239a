use serde::Serialize;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DomainKind {
    WholeSpace,
    /// {x_d > 0}; used only as a comparison domain.
    HalfSpace,
    /// Ω = {|x| > 1}, the complement of the closed unit ball.
    ExteriorBall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub d: u32,
}

/// Diameter of the obstacle (the unit ball).
pub const OBSTACLE_DIAMETER: f64 = 2.0;

impl DomainSpec {
    pub fn new(kind: DomainKind, d: u32) -> Result<Self> {
        if d < 3 {
            return Err(invalid(format!("dimension must be at least 3, got {d}")));
        }
        Ok(Self { kind, d })
    }

    pub fn exterior(d: u32) -> Result<Self> {
        Self::new(DomainKind::ExteriorBall, d)
    }

    pub fn whole(d: u32) -> Result<Self> {
        Self::new(DomainKind::WholeSpace, d)
    }

    /// Distance from a point at radius r to the obstacle, for the exterior ball.
    pub fn boundary_distance(r: f64) -> f64 {
        r - 1.0
    }
}
