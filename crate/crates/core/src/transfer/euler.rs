//! Partial Euler products over primitive closed geodesics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::representations::UnitaryRep;
use crate::scheme::SchottkyScheme;
use crate::words::for_each_class;

/// Factors with `|x| < EULER_FLOOR` are dropped; `ln(1 − x) ≈ −x` below ~1e−17 relative.
const EULER_FLOOR: f64 = 1e-18;
const K_CAP: usize = 100_000;

#[derive(Clone, Debug, Serialize)]
pub struct PrimeOrbit {
    pub word: Vec<usize>,
    pub length: f64,
    pub eigenvalues: Vec<Complex64>,
}

/// Primitive classes of word length `≤ cutoff` with their lengths and twist eigenvalues.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeOrbits {
    pub cutoff: usize,
    pub rank: usize,
    pub orbits: Vec<PrimeOrbit>,
    /// `log(1/θ)`; every omitted class has length at least `(cutoff + 1)` times this.
    pub log_inv_theta: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EulerValue {
    /// A logarithm of the partial product; the imaginary part is defined modulo `2π`.
    pub log: Complex64,
    /// Logarithmic derivative `d/ds log` of the partial product.
    pub dlog: Complex64,
    /// `ln` of the product with every factor `1 − x`, `|x| > 1`, rescaled to `1/x − 1`;
    /// small values flag proximity to a zero on a scale-free footing.
    pub normalized_ln_abs: f64,
    pub k_max: usize,
    /// Extrapolated size of the omitted classes, relative to the value (`0` when the class list is complete).
    pub tail_estimate: f64,
    /// `Re s ≤ δ`: the product need not converge.
    pub divergence_warning: bool,
}

impl EulerValue {
    pub fn value(&self) -> Complex64 {
        self.log.exp()
    }
}

impl PrimeOrbits {
    pub fn enumerate(scheme: &SchottkyScheme<f64>, rep: &UnitaryRep, cutoff: usize) -> Result<Self> {
        let m = scheme.rank();
        let mut words = Vec::new();
        // rank one has only γ and γ⁻¹
        let max_len = if m == 1 { 1 } else { cutoff };
        for n in 1..=max_len {
            for_each_class(m, n, true, |w| words.push(w.to_vec()));
        }
        let orbits = words
            .into_par_iter()
            .map(|w| {
                let length = scheme.word_matrix(&w).displacement_length()?;
                let eigenvalues = rep.word_eigenvalues(&w);
                Ok(PrimeOrbit {
                    word: w,
                    length,
                    eigenvalues,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let theta = scheme.contraction_bound()?;
        Ok(PrimeOrbits {
            cutoff,
            rank: m,
            orbits,
            log_inv_theta: (1.0 / theta).ln(),
        })
    }

    pub fn is_complete(&self) -> bool {
        self.rank == 1
    }

    /// Geodesics with length below this bound are all present.
    pub fn complete_below(&self) -> f64 {
        if self.is_complete() {
            f64::INFINITY
        } else {
            (self.cutoff + 1) as f64 * self.log_inv_theta
        }
    }

    pub fn eval(&self, s: Complex64, delta: Option<f64>) -> EulerValue {
        // running product with its modulus split off; the phase is only needed mod 2π
        let mut acc = Complex64::new(1.0, 0.0);
        let mut ln_abs = 0.0;
        let mut dlog = Complex64::new(0.0, 0.0);
        let mut big_ln = 0.0;
        let mut k_max = 0;
        let mut shells = vec![0.0; self.cutoff + 1];
        for o in &self.orbits {
            let decay = (-o.length).exp();
            let dim = o.eigenvalues.len() as f64;
            let mut x = (-s * o.length).exp();
            let mut k = 0;
            loop {
                let xn = x.norm();
                if (xn < EULER_FLOOR && s.re + k as f64 > 0.0) || k > K_CAP {
                    break;
                }
                for lam in &o.eigenvalues {
                    let lx = lam * x;
                    let f = Complex64::new(1.0, 0.0) - lx;
                    acc *= f;
                    dlog += lx * o.length / f;
                    let n2 = acc.norm_sqr();
                    if n2 > 0.0 && !(1e-100..=1e100).contains(&n2) {
                        let n = n2.sqrt();
                        ln_abs += n.ln();
                        acc /= n;
                    }
                }
                if xn > 1.0 {
                    big_ln += dim * xn.ln();
                }
                x *= decay;
                k += 1;
            }
            k_max = k_max.max(k);
            if o.word.len() <= self.cutoff {
                shells[o.word.len()] += dim * (-s.re * o.length).exp();
            }
        }
        let log = Complex64::new(ln_abs, 0.0) + acc.ln();
        let normalized = log.re - big_ln;
        let tail_estimate = if self.is_complete() {
            0.0
        } else {
            let n = self.cutoff;
            let ratio = if n >= 2 && shells[n - 1] > 0.0 {
                shells[n] / shells[n - 1]
            } else {
                f64::INFINITY
            };
            if ratio < 1.0 {
                shells[n] * ratio / (1.0 - ratio) / log.re.exp().max(f64::MIN_POSITIVE)
            } else {
                f64::INFINITY
            }
        };
        EulerValue {
            log,
            dlog,
            normalized_ln_abs: normalized,
            k_max: k_max.saturating_sub(1),
            tail_estimate,
            divergence_warning: delta.map_or(false, |d| s.re <= d),
        }
    }
}

/// One-shot partial product `∏_{WL(γ) ≤ N} ∏_k det(1 − ϱ(γ) e^{−(s+k)ℓ(γ)})`.
pub fn euler_product(
    scheme: &SchottkyScheme<f64>,
    rep: &UnitaryRep,
    s: Complex64,
    word_cutoff: usize,
    delta: Option<f64>,
) -> Result<EulerValue> {
    Ok(PrimeOrbits::enumerate(scheme, rep, word_cutoff)?.eval(s, delta))
}

/// Closed form `∏_{k≥0}(1 − e^{−(s+k)ℓ})²` for the cylinder of length `ℓ`, in log form.
pub fn cylinder_zeta_log(ell: f64, s: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut k = 0usize;
    loop {
        let x = (-(s + k as f64) * ell).exp();
        if x.norm() < EULER_FLOOR && s.re + k as f64 > 0.0 {
            break;
        }
        acc += 2.0 * (Complex64::new(1.0, 0.0) - x).ln();
        k += 1;
    }
    acc
}
