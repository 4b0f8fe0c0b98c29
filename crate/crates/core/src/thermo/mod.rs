//! Refined covers of the limit set, pressure and Hausdorff dimension.

pub mod cover;
pub mod pressure;
pub mod separation;

pub use cover::{CoverDisk, DiskCover};
pub use pressure::{
    hausdorff_dimension, hausdorff_dimension_with, largest_real_det_zero, DEFAULT_DIMENSION_Q, pressure, pressure_on, word_sum_pressure,
    DimensionReport,
};
pub use separation::{branch_separation, fit_separation, SeparationFit};
