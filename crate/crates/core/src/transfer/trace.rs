//! Traces of powers of the transfer operator as sums over closed geodesics.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::representations::UnitaryRep;
use crate::scheme::SchottkyScheme;
use crate::transfer::assemble::TransferMatrix;
use crate::words::{for_each_class, for_each_reduced_word, is_cyclically_reduced, reduced_word_count};

const WORD_BUDGET: u64 = 20_000_000;

fn weight(rep: &UnitaryRep, scheme: &SchottkyScheme<f64>, word: &[usize], s: Complex64) -> Result<Complex64> {
    let ell = scheme.word_matrix(word).displacement_length()?;
    Ok(rep.trace(word) * (-s * ell).exp() / (1.0 - (-ell).exp()))
}

fn check_budget(m: usize, n: usize) -> Result<()> {
    if reduced_word_count(m, n) > WORD_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "{} reduced words of length {n}",
            reduced_word_count(m, n)
        )));
    }
    Ok(())
}

/// `Σ_{d | n} Σ_{primitive, WL = d} d·tr ϱ(γ^{n/d})·e^{−s ℓ(γ) n/d}/(1 − e^{−ℓ(γ) n/d})`.
pub fn trace_orbit_sum(scheme: &SchottkyScheme<f64>, rep: &UnitaryRep, n: usize, s: Complex64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidParameter("power must be positive".into()));
    }
    let m = scheme.rank();
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = None;
    for d in (1..=n).filter(|d| n % d == 0) {
        check_budget(m, d)?;
        let reps = n / d;
        for_each_class(m, d, true, |w| {
            let mut power = Vec::with_capacity(n);
            for _ in 0..reps {
                power.extend_from_slice(w);
            }
            // ℓ(γᵏ) = k·ℓ(γ)
            match scheme.word_matrix(w).displacement_length() {
                Ok(l) => {
                    let ell = l * reps as f64;
                    total += rep.trace(&power) * (-s * ell).exp() / (1.0 - (-ell).exp()) * d as f64;
                }
                Err(e) => err = Some(e),
            }
        });
    }
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// The same sum taken word by word over all cyclically reduced words of length `n`.
pub fn trace_word_sum(scheme: &SchottkyScheme<f64>, rep: &UnitaryRep, n: usize, s: Complex64) -> Result<Complex64> {
    let m = scheme.rank();
    check_budget(m, n)?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = None;
    for_each_reduced_word(m, n, |_| true, |w| {
        if is_cyclically_reduced(w, m) {
            match weight(rep, scheme, w, s) {
                Ok(x) => total += x,
                Err(e) => err = Some(e),
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// `Tr(Tⁿ)` of the assembled matrix.
pub fn matrix_trace_power(t: &TransferMatrix, n: usize) -> Complex64 {
    let dim = t.dim();
    let mut p = DMatrix::<Complex64>::identity(dim, dim);
    for _ in 0..n {
        p = &p * &t.matrix;
    }
    p.trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::cylinder_scheme;

    #[test]
    fn cylinder_closed_form() {
        let sch = cylinder_scheme(2.0).unwrap();
        let s = Complex64::new(0.3, 1.7);
        for n in 1..=5 {
            let t = trace_orbit_sum(&sch, &UnitaryRep::trivial(1, 1), n, s).unwrap();
            let l = 2.0 * n as f64;
            let expect = 2.0 * (-s * l).exp() / (1.0 - (-l).exp());
            assert!((t - expect).norm() < 1e-14 * expect.norm().max(1.0), "{n} {t} {expect}");
        }
    }

    #[test]
    fn necklace_and_word_sums_agree() {
        let sch = crate::scheme::pants_scheme(2.0, 2.5, 8.0).unwrap();
        let s = Complex64::new(-0.4, 2.0);
        for n in 1..=6 {
            let a = trace_orbit_sum(&sch, &UnitaryRep::trivial(2, 1), n, s).unwrap();
            let b = trace_word_sum(&sch, &UnitaryRep::trivial(2, 1), n, s).unwrap();
            assert!((a - b).norm() < 1e-10 * b.norm().max(1.0), "{n} {a} {b}");
        }
    }
}
