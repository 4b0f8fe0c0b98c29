//! Bergman-basis truncation of the twisted transfer operator.
//!
//! On `H²(E_u)` the orthonormal monomials are `κ_{u,n}(z) = √((n+1)/(π r²))·((z−c)/r)ⁿ`.
//! For `h` holomorphic near the closed disk with Taylor coefficients `a_n` at `c`,
//! `⟨h, κ_{u,n}⟩ = a_n rⁿ √(π r²/(n+1))`. The coefficients come from a `K`-point
//! trapezoid rule on a circle of radius `ρ` around `c`, evaluated with one FFT per column.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::Moebius;
use crate::representations::UnitaryRep;
use crate::scheme::{Disk, SchottkyScheme};
use crate::thermo::cover::DiskCover;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssemblyOptions {
    /// Highest monomial order per disk.
    pub q: usize,
    /// Number of quadrature nodes as a multiple of `Q + 1` (at least 4).
    pub node_factor: usize,
    /// Contour radius as a fraction of the disk radius.
    pub contour_fraction: f64,
    /// Re-assemble with doubled nodes and fail if any entry moves by more than `1e−12` (relative to the largest entry).
    pub check_quadrature: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            q: 40,
            node_factor: 4,
            contour_fraction: 1.0,
            check_quadrature: false,
        }
    }
}

impl AssemblyOptions {
    pub fn with_q(q: usize) -> Self {
        AssemblyOptions {
            q,
            ..Self::default()
        }
    }

    fn nodes(&self) -> usize {
        (self.node_factor.max(4) * (self.q + 1)).next_power_of_two()
    }
}

#[derive(Clone, Debug)]
pub struct TransferMatrix {
    pub s: Complex64,
    pub q: usize,
    pub rep_dim: usize,
    pub level: usize,
    pub disks: usize,
    pub scheme_fingerprint: u64,
    /// Index `(p·(Q+1) + n)·d + k` for disk `p`, monomial `n`, representation coordinate `k`.
    pub matrix: DMatrix<Complex64>,
}

impl TransferMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn index(&self, disk: usize, order: usize, coord: usize) -> usize {
        (disk * (self.q + 1) + order) * self.rep_dim + coord
    }

    /// Cover degree when the twist is a permutation representation.
    pub fn cover_degree(&self) -> usize {
        self.rep_dim
    }
}

/// `(g′(z))^s` with the principal logarithm; positive real on the real trace of the disk.
pub(crate) fn derivative_power(g: &Moebius<f64>, disk_center: f64, z: Complex64, s: Complex64) -> Complex64 {
    let w0 = g.c * disk_center + g.d;
    let sign = if w0 < 0.0 { -1.0 } else { 1.0 };
    let w = (z * g.c + g.d) * sign;
    (-2.0 * s * w.ln()).exp()
}

struct Block {
    target: usize,
    source: usize,
    letter: usize,
    values: DMatrix<Complex64>,
}

fn scalar_block(
    branch: &Moebius<f64>,
    target: &Disk<f64>,
    source: &Disk<f64>,
    s: Complex64,
    q: usize,
    k: usize,
    fraction: f64,
    fft: &Arc<dyn Fft<f64>>,
) -> DMatrix<Complex64> {
    let q1 = q + 1;
    let rho = fraction * target.radius;
    let c = Complex64::new(target.center, 0.0);
    let cs = Complex64::new(source.center, 0.0);
    let mut buf = vec![Complex64::new(0.0, 0.0); k * q1];
    for t in 0..k {
        let z = c + Complex64::from_polar(rho, 2.0 * PI * t as f64 / k as f64);
        let w = branch.apply_finite(z).expect("pole outside the disk");
        let phi = derivative_power(branch, target.center, z, s);
        let zeta = (w - cs) / source.radius;
        let mut p = phi / (PI.sqrt() * source.radius);
        for col in 0..q1 {
            buf[col * k + t] = p * ((col + 1) as f64).sqrt();
            p *= zeta;
        }
    }
    fft.process(&mut buf);
    let mut out = DMatrix::zeros(q1, q1);
    let ratio = target.radius / rho;
    for col in 0..q1 {
        let mut scale = target.radius * PI.sqrt() / k as f64;
        for row in 0..q1 {
            out[(row, col)] = buf[col * k + row] * (scale / ((row + 1) as f64).sqrt());
            scale *= ratio;
        }
    }
    out
}

fn blocks(
    scheme: &SchottkyScheme<f64>,
    cover: &DiskCover,
    s: Complex64,
    opts: &AssemblyOptions,
    nodes: usize,
) -> Result<Vec<Block>> {
    let mut jobs = Vec::new();
    for u in 0..cover.len() {
        let target = &cover.disks()[u].disk;
        for a in 0..scheme.alphabet_size() {
            if let Some(v) = cover.transition(u, a) {
                let g = scheme.branch(a);
                if let Some(p) = g.pole() {
                    if (p - target.center).abs() <= target.radius {
                        return Err(Error::BranchPoleInDisk { disk: u });
                    }
                }
                let image = target.image_under(g).ok_or(Error::BranchPoleInDisk { disk: u })?;
                let source = &cover.disks()[v].disk;
                if !source.contains_disk(&image, 0.0) {
                    return Err(Error::Infeasible(format!(
                        "branch {a} does not map disk {u} strictly inside disk {v}"
                    )));
                }
                jobs.push((u, v, a));
            }
        }
    }
    let fft = FftPlanner::new().plan_fft_forward(nodes);
    Ok(jobs
        .into_par_iter()
        .map(|(u, v, a)| Block {
            target: u,
            source: v,
            letter: a,
            values: scalar_block(
                scheme.branch(a),
                &cover.disks()[u].disk,
                &cover.disks()[v].disk,
                s,
                opts.q,
                nodes,
                opts.contour_fraction,
                &fft,
            ),
        })
        .collect())
}

/// Assembles `𝓛_{s,ϱ}` on the cover disks. Block `(u, v)` is `B ⊗ ϱ(γ_a)` where `B`
/// is the scalar block of branch `a` from `E_u` into `E_v`.
pub fn assemble(
    scheme: &SchottkyScheme<f64>,
    cover: &DiskCover,
    rep: &UnitaryRep,
    s: Complex64,
    opts: &AssemblyOptions,
) -> Result<TransferMatrix> {
    if opts.q < 4 {
        return Err(Error::InvalidParameter("truncation order Q must be at least 4".into()));
    }
    if rep.rank() != scheme.rank() {
        return Err(Error::DimensionMismatch {
            expected: scheme.rank(),
            got: rep.rank(),
        });
    }
    let nodes = opts.nodes();
    let bl = blocks(scheme, cover, s, opts, nodes)?;
    if opts.check_quadrature {
        let fine = blocks(scheme, cover, s, opts, 2 * nodes)?;
        let scale = bl
            .iter()
            .flat_map(|b| b.values.iter())
            .map(|z| z.norm())
            .fold(1.0, f64::max);
        let change = bl
            .iter()
            .zip(&fine)
            .map(|(x, y)| (&x.values - &y.values).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
            / scale;
        if change > 1e-12 {
            return Err(Error::QuadratureNonConvergence { change });
        }
    }
    let q1 = opts.q + 1;
    let d = rep.dim();
    let n = cover.len() * q1 * d;
    let mut matrix = DMatrix::zeros(n, n);
    for b in &bl {
        let r = rep.image(b.letter);
        for row in 0..q1 {
            for col in 0..q1 {
                let x = b.values[(row, col)];
                let i0 = (b.target * q1 + row) * d;
                let j0 = (b.source * q1 + col) * d;
                for k in 0..d {
                    for l in 0..d {
                        let rv = r[(k, l)];
                        if rv.re != 0.0 || rv.im != 0.0 {
                            matrix[(i0 + k, j0 + l)] += x * rv;
                        }
                    }
                }
            }
        }
    }
    Ok(TransferMatrix {
        s,
        q: opts.q,
        rep_dim: d,
        level: cover.level(),
        disks: cover.len(),
        scheme_fingerprint: scheme.fingerprint(),
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{induced_permutation_rep, AbelianCover, CosetAction};
    use crate::scheme::{cylinder_scheme, pants_scheme};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bergman_coefficient_normalisation_matches_area_quadrature() {
        // h(z) = exp(z) on the disk |z − 0.3| < 0.7; compare with polar Gauss-free midpoint quadrature
        let disk = Disk::new(0.3, 0.7).unwrap();
        let g = Moebius::identity();
        let fft = FftPlanner::new().plan_fft_forward(64);
        // identity branch with s = 0 gives the coefficients of κ_{v,q} itself: the identity matrix
        let b = scalar_block(&g, &disk, &disk, c(0.0, 0.0), 6, 64, 1.0, &fft);
        for i in 0..7 {
            for j in 0..7 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((b[(i, j)] - expect).norm() < 1e-13);
            }
        }
        // an independent check: ⟨exp, κ_n⟩ by direct area quadrature, Simpson in the radius
        let (nr, nt) = (400, 256);
        for n in 0..4 {
            let mut acc = c(0.0, 0.0);
            for i in 0..=nr {
                let w = (if i == 0 || i == nr { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 }) / 3.0;
                let rad = i as f64 / nr as f64 * disk.radius;
                for t in 0..nt {
                    let th = 2.0 * PI * t as f64 / nt as f64;
                    let z = c(disk.center, 0.0) + Complex64::from_polar(rad, th);
                    let kappa = ((n + 1) as f64 / (PI * disk.radius * disk.radius)).sqrt()
                        * ((z - disk.center) / disk.radius).powu(n as u32);
                    acc += z.exp() * kappa.conj() * rad * w;
                }
            }
            let area = acc * (disk.radius / nr as f64) * (2.0 * PI / nt as f64);
            let mut fact = 1.0;
            for k in 1..=n {
                fact *= k as f64;
            }
            let taylor = 0.3f64.exp() / fact;
            let formula = taylor * disk.radius.powi(n as i32) * (PI * disk.radius * disk.radius / (n + 1) as f64).sqrt();
            assert!((area.re - formula).abs() < 1e-8 * formula.abs(), "{n} {area} {formula}");
        }
    }

    #[test]
    fn trivial_rep_real_at_real_s_and_block_sparsity() {
        let s = pants_scheme(2.0, 2.0, 8.0).unwrap();
        let cover = DiskCover::base(&s);
        let t = assemble(&s, &cover, &UnitaryRep::trivial(2, 1), c(0.7, 0.0), &AssemblyOptions::with_q(12)).unwrap();
        assert!(t.matrix.iter().all(|z| z.im.abs() < 1e-14));
        // disk 0 receives nothing from branch 2 (= γ₁⁻¹’s inverse letter), so block (0, 2) vanishes
        for row in 0..13 {
            for col in 0..13 {
                assert_eq!(t.matrix[(t.index(0, row, 0), t.index(2, col, 0))], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn kronecker_with_trivial_rep_is_exact() {
        let s = pants_scheme(2.0, 2.0, 8.0).unwrap();
        let cover = DiskCover::base(&s);
        let opts = AssemblyOptions::with_q(8);
        let sval = c(0.3, 2.0);
        let base = assemble(&s, &cover, &UnitaryRep::trivial(2, 1), sval, &opts).unwrap();
        let d = 3;
        let big = assemble(&s, &cover, &UnitaryRep::trivial(2, d), sval, &opts).unwrap();
        let kron = base.matrix.kronecker(&DMatrix::<Complex64>::identity(d, d));
        assert_eq!(big.matrix, kron);
    }

    #[test]
    fn permutation_rep_interleaves_scalar_blocks() {
        let s = pants_scheme(2.0, 2.0, 8.0).unwrap();
        let cover = DiskCover::base(&s);
        let opts = AssemblyOptions::with_q(6);
        let sval = c(0.5, -1.0);
        let action = CosetAction::new(vec![vec![1, 2, 0], vec![1, 0, 2]]).unwrap();
        let rep = induced_permutation_rep(&action);
        let t = assemble(&s, &cover, &rep, sval, &opts).unwrap();
        let base = assemble(&s, &cover, &UnitaryRep::trivial(2, 1), sval, &opts).unwrap();
        for u in 0..4 {
            for a in 0..4 {
                let Some(v) = cover.transition(u, a) else { continue };
                let p = action.letter_perm(a);
                for row in 0..7 {
                    for col in 0..7 {
                        let x = base.matrix[(base.index(u, row, 0), base.index(v, col, 0))];
                        for l in 0..3 {
                            for k in 0..3 {
                                let expect = if p[l] == k { x } else { c(0.0, 0.0) };
                                assert_eq!(t.matrix[(t.index(u, row, k), t.index(v, col, l))], expect);
                            }
                        }
                    }
                }
            }
        }
        let z3 = AbelianCover::cyclic(3, &[1, 0]).unwrap();
        assert!(assemble(&s, &cover, &induced_permutation_rep(&z3.action), sval, &opts).is_ok());
    }

    #[test]
    fn cylinder_leading_entry_tracks_displacement() {
        for ell in [4.0, 8.0, 12.0] {
            let s = cylinder_scheme(ell).unwrap();
            let cover = DiskCover::base(&s);
            let sval = c(0.8, 0.0);
            let t = assemble(&s, &cover, &UnitaryRep::trivial(1, 1), sval, &AssemblyOptions::with_q(10)).unwrap();
            // disk 0 is fed by branch 0 from disk 0
            let lead = t.matrix[(0, 0)].norm();
            let rel = lead / (-0.8 * ell).exp();
            assert!((rel - 1.0).abs() < 4.0 * (-ell / 2.0).exp(), "{ell} {rel}");
        }
    }

    #[test]
    fn quadrature_check_passes_and_entries_decay() {
        let s = pants_scheme(2.0, 2.0, 8.0).unwrap();
        let cover = DiskCover::base(&s);
        let mut opts = AssemblyOptions::with_q(24);
        opts.check_quadrature = true;
        let t = assemble(&s, &cover, &UnitaryRep::trivial(2, 1), c(0.5, 3.0), &opts).unwrap();
        let theta = s.contraction_bound().unwrap().sqrt();
        // column norms decay in the source monomial order
        let col = |q: usize| (0..t.dim()).map(|i| t.matrix[(i, t.index(1, q, 0))].norm()).fold(0.0, f64::max);
        assert!(col(20) < col(2) * theta.powi(16) * 10.0);
        assert!(matches!(
            assemble(&s, &cover, &UnitaryRep::trivial(2, 1), c(0.5, 0.0), &AssemblyOptions::with_q(3)),
            Err(Error::InvalidParameter(_))
        ));
    }
}
