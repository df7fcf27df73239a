//! Special functions: Gamma, real-order Bessel functions, and exterior-ball eigenmodes.

pub mod bessel;
pub mod eigenmode;
pub mod gamma;

pub use bessel::{bessel_j, bessel_jy, bessel_y, BesselOrder, Evaluation};
pub use eigenmode::{eigenmode, eigenmode_deriv, spectral_density, EigenmodeQuery};
pub use gamma::{gamma_fn, ln_gamma};
