use serde::Serialize;

use crate::transfer::assemble::TransferMatrix;

/// Singular values in decreasing order.
pub fn singular_values(t: &TransferMatrix) -> Vec<f64> {
    if t.dim() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = t.matrix.clone().svd(false, false).singular_values.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `Σ_k ln(1 + μ_k)`, the Weyl bound on `ln|det(I − T)|`.
pub fn weyl_bound(singular: &[f64]) -> f64 {
    singular.iter().map(|m| m.ln_1p()).sum()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(k, ln μ_k)` for the values above `floor · μ₀`.
pub fn decay_fit(singular: &[f64], floor: f64) -> Option<DecayFit> {
    let top = *singular.first()?;
    let pts: Vec<(f64, f64)> = singular
        .iter()
        .enumerate()
        .take_while(|(_, &m)| m > floor * top && m > 0.0)
        .map(|(k, &m)| (k as f64, m.ln()))
        .collect();
    linear_fit(&pts)
}

pub fn linear_fit(pts: &[(f64, f64)]) -> Option<DecayFit> {
    let n = pts.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(DecayFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: n,
    })
}
