use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::representations::UnitaryRep;
use crate::scheme::SchottkyScheme;
use crate::thermo::cover::DiskCover;
use crate::transfer::assemble::{assemble, AssemblyOptions, TransferMatrix};

/// Digits of headroom in double precision before the determinant is mostly rounding.
pub const PRECISION_BUDGET_DIGITS: f64 = 14.0;

/// `det(I − T)` kept in logarithmic form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetValue {
    /// `ln|det|`; `−∞` for an exactly singular matrix.
    pub ln_abs: f64,
    /// Argument in `(−π, π]`.
    pub arg: f64,
    /// `log₁₀` of the largest entry of `T`, a proxy for digits lost to cancellation.
    pub condition_exponent: f64,
    pub precision_warning: bool,
}

impl DetValue {
    pub fn value(&self) -> Complex64 {
        if self.ln_abs == f64::NEG_INFINITY {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.ln_abs.exp(), self.arg)
    }

    pub fn log(&self) -> Complex64 {
        Complex64::new(self.ln_abs, self.arg)
    }
}

/// Determinant of a square complex matrix via partial-pivot LU, in log form.
pub fn log_det(a: DMatrix<Complex64>) -> (f64, f64) {
    let n = a.nrows();
    if n == 0 {
        return (0.0, 0.0);
    }
    let lu = a.lu();
    let sign: f64 = lu.p().determinant();
    let u = lu.u();
    let mut ln_abs = 0.0;
    let mut arg = if sign < 0.0 { std::f64::consts::PI } else { 0.0 };
    for i in 0..n {
        let x = u[(i, i)];
        if x.re == 0.0 && x.im == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        ln_abs += x.norm().ln();
        arg += x.arg();
    }
    (ln_abs, Complex64::from_polar(1.0, arg).arg())
}

pub fn fredholm_det(t: &TransferMatrix) -> DetValue {
    let n = t.dim();
    let biggest = t.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let condition_exponent = biggest.max(1.0).log10();
    let a = DMatrix::<Complex64>::identity(n, n) - &t.matrix;
    let (ln_abs, arg) = log_det(a);
    DetValue {
        ln_abs,
        arg,
        condition_exponent,
        precision_warning: condition_exponent > PRECISION_BUDGET_DIGITS,
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AdaptiveDet {
    pub det: DetValue,
    pub q: usize,
    pub relative_change: f64,
}

/// Doubles `Q` from `q0` until successive determinants differ by less than `rel_tol`.
pub fn fredholm_det_adaptive(
    scheme: &SchottkyScheme<f64>,
    cover: &DiskCover,
    rep: &UnitaryRep,
    s: Complex64,
    q0: usize,
    q_max: usize,
    rel_tol: f64,
) -> Result<AdaptiveDet> {
    let eval = |q: usize| -> Result<DetValue> {
        Ok(fredholm_det(&assemble(scheme, cover, rep, s, &AssemblyOptions::with_q(q))?))
    };
    let mut q = q0.max(4);
    let mut prev = eval(q)?;
    while 2 * q <= q_max {
        let next = eval(2 * q)?;
        let change = relative_difference(&prev, &next);
        q *= 2;
        if change < rel_tol {
            return Ok(AdaptiveDet {
                det: next,
                q,
                relative_change: change,
            });
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "determinant not stable to {rel_tol:e} up to Q = {q}"
    )))
}

/// `|a − b| / |b|` computed without leaving log form when the magnitudes are extreme.
pub fn relative_difference(a: &DetValue, b: &DetValue) -> f64 {
    if b.ln_abs == f64::NEG_INFINITY {
        return if a.ln_abs == f64::NEG_INFINITY { 0.0 } else { f64::INFINITY };
    }
    let ratio = (a.log() - b.log()).exp();
    (ratio - 1.0).norm()
}
