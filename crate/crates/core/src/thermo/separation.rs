use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scheme::SchottkyScheme;
use crate::transfer::svd::linear_fit;
use crate::words::for_each_reduced_word;

/// `min |γ_α⁻¹ z − γ_β⁻¹ z|` over distinct `α, β ∈ 𝒲_N^j`, all `j`, and `samples` points per disk.
/// Returns `+∞` when no distinct pair exists (rank one).
pub fn branch_separation(scheme: &SchottkyScheme<f64>, n: usize, samples: usize) -> Result<f64> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidParameter("N and samples must be positive".into()));
    }
    let m = scheme.rank();
    let mut best = f64::INFINITY;
    for j in 0..2 * m {
        let disk = scheme.disk(j);
        let mut inverses = Vec::new();
        for_each_reduced_word(m, n, |a| scheme.admissible(a, j), |w| inverses.push(scheme.word_matrix(w).inverse()));
        if inverses.len() < 2 {
            continue;
        }
        for i in 0..samples {
            // points on a circle of half the radius, plus the centre
            let z = if i == 0 {
                Complex64::new(disk.center, 0.0)
            } else {
                let t = 2.0 * std::f64::consts::PI * i as f64 / (samples - 1).max(1) as f64;
                Complex64::new(disk.center, 0.0) + Complex64::from_polar(0.5 * disk.radius, t)
            };
            let pts: Vec<Complex64> = inverses.iter().filter_map(|g| g.apply_finite(z)).collect();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    best = best.min((pts[a] - pts[b]).norm());
                }
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationFit {
    pub measurements: Vec<(usize, f64)>,
    /// `ϱ` in `c·ϱ^N`.
    pub rho: f64,
    pub c: f64,
}

/// Fits `log d_N ≈ log c + N log ϱ`, then lowers `c` until `c·ϱ^N ≤ d_N` at every measured `N`.
pub fn fit_separation(scheme: &SchottkyScheme<f64>, max_n: usize, samples: usize) -> Result<SeparationFit> {
    let measurements = (1..=max_n)
        .map(|n| branch_separation(scheme, n, samples).map(|d| (n, d)))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = measurements
        .iter()
        .filter(|(_, d)| d.is_finite())
        .map(|&(n, d)| (n as f64, d.ln()))
        .collect();
    let fit = linear_fit(&pts).ok_or_else(|| Error::InvalidParameter("need three finite measurements".into()))?;
    let log_c = pts.iter().map(|&(n, l)| l - n * fit.slope).fold(f64::INFINITY, f64::min);
    Ok(SeparationFit {
        measurements,
        rho: fit.slope.exp(),
        c: log_c.exp(),
    })
}
