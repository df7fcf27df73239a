pub mod error;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub mod family;
pub mod radial;
pub mod report;
pub mod domain;
pub mod transforms;
pub mod heat;
pub mod fit;
pub mod lp_theory;
pub mod inequalities;
pub mod counterexamples;

/// Library version; part of every persistent cache key.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
