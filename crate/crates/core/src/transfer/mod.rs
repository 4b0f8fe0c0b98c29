//! Transfer-operator matrices, Fredholm determinants, Euler products and traces.

pub mod assemble;
pub mod det;
pub mod euler;
pub mod svd;
pub mod trace;

pub use assemble::{assemble, AssemblyOptions, TransferMatrix};
pub use det::{fredholm_det, fredholm_det_adaptive, log_det, relative_difference, AdaptiveDet, DetValue};
pub use euler::{cylinder_zeta_log, euler_product, EulerValue, PrimeOrbit, PrimeOrbits};
pub use svd::{decay_fit, linear_fit, singular_values, weyl_bound, DecayFit};
pub use trace::{matrix_trace_power, trace_orbit_sum, trace_word_sum};
