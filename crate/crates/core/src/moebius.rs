//! Möbius maps in PSL₂(ℝ) acting on the extended complex plane.

use std::ops::Mul;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{geometric_tol, Real};

/// A point of the Riemann sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtPoint<T> {
    Finite(Complex<T>),
    Infinity,
}

impl<T: Real> ExtPoint<T> {
    pub fn finite(re: T, im: T) -> Self {
        ExtPoint::Finite(Complex::new(re, im))
    }

    pub fn as_finite(&self) -> Option<Complex<T>> {
        match self {
            ExtPoint::Finite(z) => Some(*z),
            ExtPoint::Infinity => None,
        }
    }
}

impl<T> From<Complex<T>> for ExtPoint<T> {
    fn from(z: Complex<T>) -> Self {
        ExtPoint::Finite(z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

/// Real 2×2 matrix of unit determinant, taken modulo ±1.
///
/// Entries are stored as given (sign not canonicalised); comparisons go
/// through [`Moebius::approx_eq`], which identifies `g` with `-g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Moebius<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

impl<T: Real> Moebius<T> {
    /// Builds the map and rescales it to determinant one. Entries already at determinant one
    /// up to rounding are kept as given, so stored matrices reload bit for bit.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > T::zero()) || !det.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "matrix determinant {} is not positive",
                det
            )));
        }
        if (det - T::one()).abs() < T::lit(1e-12) {
            return Ok(Moebius { a, b, c, d });
        }
        let s = det.sqrt();
        Ok(Moebius {
            a: a / s,
            b: b / s,
            c: c / s,
            d: d / s,
        })
    }

    pub fn from_rows(m: [[T; 2]; 2]) -> Result<Self> {
        Self::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }

    pub fn identity() -> Self {
        Moebius {
            a: T::one(),
            b: T::zero(),
            c: T::zero(),
            d: T::one(),
        }
    }

    /// Diagonal map `z ↦ λ² z`.
    pub fn dilation(lambda: T) -> Self {
        Moebius {
            a: lambda,
            b: T::zero(),
            c: T::zero(),
            d: T::one() / lambda,
        }
    }

    pub fn rows(&self) -> [[T; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Moebius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Moebius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    /// `h g h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.compose(self).compose(&h.inverse())
    }

    /// Re-normalises accumulated products back to determinant one.
    pub fn renormalized(&self) -> Self {
        let det = self.det();
        if (det - T::one()).abs() < T::lit(1e-12) {
            return *self;
        }
        if det > T::zero() {
            let s = det.sqrt();
            Moebius {
                a: self.a / s,
                b: self.b / s,
                c: self.c / s,
                d: self.d / s,
            }
        } else {
            *self
        }
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let close = |s: T| {
            (self.a - s * other.a).abs() <= tol
                && (self.b - s * other.b).abs() <= tol
                && (self.c - s * other.c).abs() <= tol
                && (self.d - s * other.d).abs() <= tol
        };
        close(T::one()) || close(-T::one())
    }

    pub fn classify(&self) -> Classification {
        let t = self.trace().abs();
        let two = T::lit(2.0);
        if (t - two).abs() <= geometric_tol::<T>() {
            Classification::Parabolic
        } else if t > two {
            Classification::Hyperbolic
        } else {
            Classification::Elliptic
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.classify() == Classification::Hyperbolic
    }

    /// Action on the Riemann sphere with the usual conventions at ∞ and at the pole.
    pub fn apply(&self, z: ExtPoint<T>) -> ExtPoint<T> {
        match z {
            ExtPoint::Infinity => {
                if self.c == T::zero() {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite(Complex::new(self.a / self.c, T::zero()))
                }
            }
            ExtPoint::Finite(z) => {
                let den = z * self.c + self.d;
                if den.re == T::zero() && den.im == T::zero() {
                    ExtPoint::Infinity
                } else {
                    ExtPoint::Finite((z * self.a + self.b) / den)
                }
            }
        }
    }

    /// Action on a finite point; `None` at the pole.
    pub fn apply_finite(&self, z: Complex<T>) -> Option<Complex<T>> {
        self.apply(ExtPoint::Finite(z)).as_finite()
    }

    pub fn apply_real(&self, x: T) -> Option<T> {
        let den = self.c * x + self.d;
        if den == T::zero() {
            None
        } else {
            Some((self.a * x + self.b) / den)
        }
    }

    /// `g′(z) = 1/(cz+d)²`.
    pub fn derivative(&self, z: Complex<T>) -> Result<Complex<T>> {
        let den = z * self.c + self.d;
        if den.norm_sqr() == T::zero() {
            return Err(Error::PoleAtPoint);
        }
        Ok(Complex::new(T::one(), T::zero()) / (den * den))
    }

    /// Real point sent to ∞, if any.
    pub fn pole(&self) -> Option<T> {
        if self.c == T::zero() {
            None
        } else {
            Some(-self.d / self.c)
        }
    }

    /// `ℓ(g) = 2 arccosh(|tr g|/2)`, the translation length of a hyperbolic element.
    pub fn displacement_length(&self) -> Result<T> {
        if !self.is_hyperbolic() {
            return Err(Error::NotHyperbolic {
                trace: self.trace().abs().as_f64(),
            });
        }
        let half = self.trace().abs() / T::lit(2.0);
        Ok(T::lit(2.0) * half.acosh())
    }

    /// Fixed points on ℝ ∪ {∞}, attracting first. Only meaningful for hyperbolic elements.
    pub fn fixed_points(&self) -> Option<(ExtPoint<T>, ExtPoint<T>)> {
        if !self.is_hyperbolic() {
            return None;
        }
        let tr = self.trace();
        let disc = (tr * tr - T::lit(4.0)).sqrt();
        if self.c == T::zero() {
            // z ↦ (a z + b)/d; finite fixed point b/(d - a), the other at ∞.
            let x = self.b / (self.d - self.a);
            let p = ExtPoint::Finite(Complex::new(x, T::zero()));
            return if self.a.abs() > self.d.abs() {
                Some((ExtPoint::Infinity, p))
            } else {
                Some((p, ExtPoint::Infinity))
            };
        }
        let two_c = T::lit(2.0) * self.c;
        let x1 = (self.a - self.d + disc) / two_c;
        let x2 = (self.a - self.d - disc) / two_c;
        // attracting: |g'(x)| = 1/(c x + d)^2 < 1
        let attracting = |x: T| (self.c * x + self.d).abs() > T::one();
        let p1 = ExtPoint::Finite(Complex::new(x1, T::zero()));
        let p2 = ExtPoint::Finite(Complex::new(x2, T::zero()));
        if attracting(x1) {
            Some((p1, p2))
        } else {
            Some((p2, p1))
        }
    }

    pub fn cast<U: Real>(&self) -> Moebius<U> {
        Moebius {
            a: U::lit(self.a.as_f64()),
            b: U::lit(self.b.as_f64()),
            c: U::lit(self.c.as_f64()),
            d: U::lit(self.d.as_f64()),
        }
    }
}

impl<T: Real> Mul for Moebius<T> {
    type Output = Moebius<T>;

    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl<'a, T: Real> Mul<&'a Moebius<T>> for &'a Moebius<T> {
    type Output = Moebius<T>;

    fn mul(self, rhs: &'a Moebius<T>) -> Moebius<T> {
        self.compose(rhs)
    }
}

/// The hyperbolic element with fixed points `center ± half_width` and translation length `ell`.
///
/// Its attracting fixed point is `center + half_width`.
pub fn hyperbolic_with_axis<T: Real>(center: T, half_width: T, ell: T) -> Result<Moebius<T>> {
    if !(ell > T::zero()) || !(half_width > T::zero()) {
        return Err(Error::InvalidParameter(
            "axis half-width and length must be positive".into(),
        ));
    }
    let h = ell / T::lit(2.0);
    let (ch, sh) = (h.cosh(), h.sinh());
    let std = Moebius {
        a: ch,
        b: sh,
        c: sh,
        d: ch,
    };
    let r = half_width.sqrt();
    let affine = Moebius {
        a: r,
        b: center / r,
        c: T::zero(),
        d: T::one() / r,
    };
    Ok(std.conjugate_by(&affine))
}
