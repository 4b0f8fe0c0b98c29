use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::representations::UnitaryRep;
use crate::scheme::SchottkyScheme;
use crate::thermo::cover::DiskCover;
use crate::transfer::assemble::{assemble, AssemblyOptions};
use crate::transfer::det::fredholm_det;
use crate::words::for_each_reduced_word;

pub const DEFAULT_DIMENSION_Q: usize = 24;
const DELTA_UPPER: f64 = 1.0 - 1e-6;

/// `log` of the spectral radius of the real transfer matrix at `σ`.
pub fn pressure(scheme: &SchottkyScheme<f64>, sigma: f64, q: usize) -> Result<f64> {
    pressure_on(scheme, &DiskCover::base(scheme), sigma, q)
}

pub fn pressure_on(scheme: &SchottkyScheme<f64>, cover: &DiskCover, sigma: f64, q: usize) -> Result<f64> {
    let t = assemble(
        scheme,
        cover,
        &UnitaryRep::trivial(scheme.rank(), 1),
        Complex64::new(sigma, 0.0),
        &AssemblyOptions::with_q(q),
    )?;
    let n = t.dim();
    let schur = nalgebra::Schur::try_new(t.matrix, 1e-15, 10_000 * n)
        .ok_or_else(|| Error::NonConvergence("Schur iteration for the spectral radius".into()))?;
    let (_, tri) = schur.unpack();
    let radius = (0..n).map(|i| tri[(i, i)].norm()).fold(0.0, f64::max);
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::NonConvergence(format!("spectral radius estimate {radius}")));
    }
    Ok(radius.ln())
}

/// `(1/n)·log Σ_{α ∈ 𝒲_n^j} |(γ_α⁻¹)′(x_j)|^σ` at the centre `x_j` of `𝒟_j`, maximised over `j`.
pub fn word_sum_pressure(scheme: &SchottkyScheme<f64>, sigma: f64, n: usize) -> Result<f64> {
    let m = scheme.rank();
    let mut best = f64::NEG_INFINITY;
    for j in 0..2 * m {
        let x = scheme.disk(j).center;
        // accumulate logs relative to a running maximum to avoid underflow
        let mut logs = Vec::new();
        let mut err = None;
        for_each_reduced_word(m, n, |a| scheme.admissible(a, j), |w| {
            // γ_α⁻¹ = γ_{α_N}⁻¹ ∘ ⋯ ∘ γ_{α_1}⁻¹
            let g = scheme.word_matrix(w).inverse();
            match g.derivative(Complex64::new(x, 0.0)) {
                Ok(d) => logs.push(sigma * d.norm().ln()),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        best = best.max((top + sum.ln()) / n as f64);
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionReport {
    pub delta: f64,
    pub pressure_samples: Vec<(f64, f64)>,
    /// Largest real zero of `σ ↦ det(I − 𝓛_σ)`.
    pub determinant_zero: f64,
    /// `δ` recomputed at `2Q`.
    pub delta_doubled: f64,
    pub q: usize,
    pub locator_gap: f64,
    pub doubling_gap: f64,
    /// Both gaps below `1e−8`.
    pub consistent: bool,
}

fn bisect(mut lo: f64, mut hi: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo.signum() == fhi.signum() {
        return Err(Error::NonConvergence(format!("no sign change on [{lo}, {hi}]")));
    }
    // bisection down to a small bracket, then secant steps guarded by the bracket
    while hi - lo > 1e-15 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn pressure_root(scheme: &SchottkyScheme<f64>, q: usize) -> Result<f64> {
    if scheme.rank() == 1 || pressure(scheme, 0.0, q)? <= 0.0 {
        return Ok(0.0);
    }
    bisect(0.0, DELTA_UPPER, |s| pressure(scheme, s, q))
}

fn det_at(scheme: &SchottkyScheme<f64>, sigma: f64, q: usize) -> Result<f64> {
    let t = assemble(
        scheme,
        &DiskCover::base(scheme),
        &UnitaryRep::trivial(scheme.rank(), 1),
        Complex64::new(sigma, 0.0),
        &AssemblyOptions::with_q(q),
    )?;
    Ok(fredholm_det(&t).value().re)
}

/// Largest real sign change of `σ ↦ det(I − 𝓛_σ)` on `[0, 1)`, scanning down from the top.
pub fn largest_real_det_zero(scheme: &SchottkyScheme<f64>, q: usize) -> Result<f64> {
    let steps = 64;
    let mut hi = DELTA_UPPER;
    let mut fhi = det_at(scheme, hi, q)?;
    for i in 1..=steps {
        let lo = DELTA_UPPER * (1.0 - i as f64 / steps as f64);
        let flo = det_at(scheme, lo, q)?;
        if flo == 0.0 {
            return Ok(lo);
        }
        if flo.signum() != fhi.signum() {
            return bisect(lo, hi, |s| det_at(scheme, s, q));
        }
        hi = lo;
        fhi = flo;
    }
    Ok(0.0)
}

pub fn hausdorff_dimension(scheme: &SchottkyScheme<f64>) -> Result<DimensionReport> {
    hausdorff_dimension_with(scheme, DEFAULT_DIMENSION_Q)
}

pub fn hausdorff_dimension_with(scheme: &SchottkyScheme<f64>, q: usize) -> Result<DimensionReport> {
    scheme.validate().map_err(Error::Validation)?;
    let delta = pressure_root(scheme, q)?;
    let delta_doubled = pressure_root(scheme, 2 * q)?;
    let determinant_zero = if scheme.rank() == 1 { 0.0 } else { largest_real_det_zero(scheme, q)? };
    let pressure_samples = (0..10)
        .into_par_iter()
        .map(|i| {
            let s = i as f64 / 9.0;
            pressure(scheme, s, q).map(|p| (s, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let locator_gap = (delta - determinant_zero).abs();
    let doubling_gap = (delta - delta_doubled).abs();
    Ok(DimensionReport {
        delta,
        pressure_samples,
        determinant_zero,
        delta_doubled,
        q,
        locator_gap,
        doubling_gap,
        consistent: locator_gap < 1e-8 && doubling_gap < 1e-8,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moebius::Moebius;
    use crate::scheme::{cylinder_scheme, pants_scheme};

    #[test]
    fn cylinder_pressure_vanishes_at_zero() {
        let s = cylinder_scheme(2.0).unwrap();
        assert!(pressure(&s, 0.0, 24).unwrap().abs() < 1e-12);
        let r = hausdorff_dimension(&s).unwrap();
        assert_eq!(r.delta, 0.0);
    }

    #[test]
    fn pants_pressure_is_decreasing_and_convex() {
        let s = pants_scheme(2.0, 2.0, 8.0).unwrap();
        let r = hausdorff_dimension(&s).unwrap();
        assert!(r.delta > 0.0 && r.delta < 0.5, "{}", r.delta);
        assert!(r.consistent, "{r:?}");
        let p: Vec<f64> = r.pressure_samples.iter().map(|x| x.1).collect();
        for w in p.windows(2) {
            assert!(w[1] < w[0]);
        }
        for w in p.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] > 0.0);
        }
        assert!(pressure(&s, 40.0, 24).unwrap() < pressure(&s, 20.0, 24).unwrap());
    }

    #[test]
    fn word_sums_approach_the_pressure() {
        let s = pants_scheme(2.0, 2.0, 8.0).unwrap();
        let p = pressure(&s, 0.5, 24).unwrap();
        let gaps: Vec<f64> = (4..=8).map(|n| (word_sum_pressure(&s, 0.5, n).unwrap() - p).abs()).collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "{gaps:?}");
        }
    }

    #[test]
    fn delta_is_conjugation_invariant_and_monotone() {
        let s = pants_scheme(2.0, 2.0, 8.0).unwrap();
        let d = hausdorff_dimension(&s).unwrap().delta;
        let h = Moebius::new(1.7, 0.4, 0.0, 1.0).unwrap();
        let c = s.conjugate(&h).unwrap();
        assert!((hausdorff_dimension(&c).unwrap().delta - d).abs() < 1e-6);
        let closer = pants_scheme(2.0, 2.0, 6.0).unwrap();
        assert!(hausdorff_dimension(&closer).unwrap().delta > d);
        let sub = s.sub_scheme(&[0]).unwrap();
        assert!(hausdorff_dimension(&sub).unwrap().delta <= d);
    }
}
