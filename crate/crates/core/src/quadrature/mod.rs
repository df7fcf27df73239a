//! One-dimensional quadrature: fixed rules, adaptive Gauss–Kronrod, semi-infinite
//! integrals, panel grids, and the radial/angular reductions of d-dimensional integrals.

pub mod adaptive;
pub mod panels;
pub mod radial;
pub mod rules;
pub mod semi_infinite;

pub use adaptive::{
    integrate, integrate_breakpoints, integrate_breakpoints_lenient, integrate_vec, integrate_with, IntegralResult, QuadOptions,
    Singular,
};
pub use panels::PanelGrid;
pub use semi_infinite::{integrate_semiinfinite, integrate_semiinfinite_with, Decay};
pub use radial::{
    angular_integral, angular_integral_with, lp_norm_radial, lp_norm_radial_with, sphere_area,
    RadialMeasure, Weight,
};
