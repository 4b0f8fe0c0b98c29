//! Resonances of Schottky surfaces and their finite covers via twisted Selberg zeta functions.

pub mod covers;
pub mod error;
pub mod harness;
pub mod moebius;
pub mod representations;
pub mod resonance;
pub mod scalar;
pub mod scheme;
pub mod thermo;
pub mod transfer;
pub mod words;

pub use error::{Error, Result};
pub use moebius::{hyperbolic_with_axis, Classification, ExtPoint, Moebius};
pub use scalar::Real;
pub use scheme::{cylinder_scheme, pants_scheme, Disk, SchottkyScheme, ValidationFailure, ValidationReport};
pub use words::Word;

pub type MoebiusMap = Moebius<f64>;
pub type MoebiusMapF32 = Moebius<f32>;
pub type Scheme = SchottkyScheme<f64>;
pub type RealDisk = Disk<f64>;
