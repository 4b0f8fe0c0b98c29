//! Scalar abstraction for the geometric layer.
//!
//! Möbius algebra, disks and word geometry are written once over [`Real`]
//! and instantiated at `f32` and `f64`. The spectral layers (transfer
//! matrices, determinants, root finding) run in `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating-point scalar usable by the geometry layer.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal; every `Real` can represent every finite `f64` approximately.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
}

/// Relative tolerance scaled to the working precision (`f64` → 1e-9, `f32` → ~1e-3).
pub(crate) fn geometric_tol<T: Real>() -> T {
    let eps = T::epsilon();
    let t = eps.sqrt() * T::lit(10.0);
    if t < T::lit(1e-9) {
        T::lit(1e-9)
    } else {
        t
    }
}
