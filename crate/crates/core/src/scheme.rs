//! Schottky schemes: 2m real-centred disks paired by m hyperbolic generators.
//!
//! Letters are 0-based. Letter `a < m` is the generator `γ_a`, letter `a + m`
//! its inverse, and letter `a` always owns disk `D_a`; `γ_a` maps the
//! exterior of `D_a` onto the interior of `D_{a+m}` (indices mod 2m). The
//! inverse branch `γ_a⁻¹` therefore maps every disk `D_j` with
//! `j ≠ a + m` into `D_a`.

use std::fmt;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::{hyperbolic_with_axis, Moebius};
use crate::scalar::{geometric_tol, Real};

/// Open Euclidean disk centred on the real axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct Disk<T> {
    pub center: T,
    pub radius: T,
}

impl<T: Real> Disk<T> {
    pub fn new(center: T, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !center.is_finite() || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "disk radius must be positive and finite (got {radius})"
            )));
        }
        Ok(Disk { center, radius })
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        (z - Complex::new(self.center, T::zero())).norm() < self.radius
    }

    /// Gap between the closures (negative when they meet).
    pub fn gap(&self, other: &Self) -> T {
        (self.center - other.center).abs() - self.radius - other.radius
    }

    /// Whether `other` lies in this disk with clearance larger than `margin`.
    pub fn contains_disk(&self, other: &Self, margin: T) -> bool {
        (self.center - other.center).abs() + other.radius + margin < self.radius
    }

    pub fn interval(&self) -> (T, T) {
        (self.center - self.radius, self.center + self.radius)
    }

    /// Exact image of the disk under a real Möbius map whose pole lies outside its closure.
    pub fn image_under(&self, g: &Moebius<T>) -> Option<Self> {
        if let Some(p) = g.pole() {
            if (p - self.center).abs() <= self.radius {
                return None;
            }
        }
        let (lo, hi) = self.interval();
        let x1 = g.apply_real(lo)?;
        let x2 = g.apply_real(hi)?;
        let two = T::lit(2.0);
        Some(Disk {
            center: (x1 + x2) / two,
            radius: (x1 - x2).abs() / two,
        })
    }

    /// Exact supremum of `|g′(z)|` over the disk; `None` if the pole meets the closure.
    pub fn sup_derivative(&self, g: &Moebius<T>) -> Option<T> {
        match g.pole() {
            None => Some(T::one() / (g.d * g.d)),
            Some(p) => {
                let dist = (p - self.center).abs() - self.radius;
                if dist <= T::zero() {
                    None
                } else {
                    Some(T::one() / (g.c * g.c * dist * dist))
                }
            }
        }
    }

    pub fn cast<U: Real>(&self) -> Disk<U> {
        Disk {
            center: U::lit(self.center.as_f64()),
            radius: U::lit(self.radius.as_f64()),
        }
    }
}

/// First violated condition of [`SchottkyScheme::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum ValidationFailure {
    Structure { detail: String },
    Disjointness { first: usize, second: usize, gap: f64 },
    Mapping { generator: usize, detail: String },
    NotHyperbolic { generator: usize, trace: f64 },
}

impl fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationFailure::Structure { detail } => write!(f, "structure: {detail}"),
            ValidationFailure::Disjointness { first, second, gap } => {
                write!(f, "disjointness: disks {first} and {second} have gap {gap:e}")
            }
            ValidationFailure::Mapping { generator, detail } => {
                write!(f, "mapping: generator {generator}: {detail}")
            }
            ValidationFailure::NotHyperbolic { generator, trace } => {
                write!(f, "generator {generator} is not hyperbolic (|tr| = {trace})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub min_gap: f64,
    /// Disk-level contraction bound; `None` if it is not below one.
    pub theta: Option<f64>,
}

/// A Schottky group given by its geometric construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SchottkyScheme<T> {
    disks: Vec<Disk<T>>,
    generators: Vec<Moebius<T>>,
    letters: Vec<Moebius<T>>,
    branches: Vec<Moebius<T>>,
}

#[derive(Serialize, Deserialize)]
struct SchemeFile {
    m: usize,
    disks: Vec<Disk<f64>>,
    generators: Vec<[[f64; 2]; 2]>,
}

impl<T: Real> SchottkyScheme<T> {
    /// Assembles a scheme without checking the geometry; see [`Self::validate`].
    pub fn new(disks: Vec<Disk<T>>, generators: Vec<Moebius<T>>) -> Result<Self> {
        let m = generators.len();
        if m == 0 {
            return Err(Error::InvalidParameter("a scheme needs at least one generator".into()));
        }
        if disks.len() != 2 * m {
            return Err(Error::InvalidParameter(format!(
                "{} disks given for {} generators",
                disks.len(),
                m
            )));
        }
        let generators: Vec<_> = generators.iter().map(|g| g.renormalized()).collect();
        let mut letters = generators.clone();
        letters.extend(generators.iter().map(|g| g.inverse()));
        let branches = letters.iter().map(|g| g.inverse()).collect();
        Ok(SchottkyScheme {
            disks,
            generators,
            letters,
            branches,
        })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn alphabet_size(&self) -> usize {
        2 * self.generators.len()
    }

    pub fn disks(&self) -> &[Disk<T>] {
        &self.disks
    }

    pub fn disk(&self, j: usize) -> &Disk<T> {
        &self.disks[j]
    }

    pub fn generators(&self) -> &[Moebius<T>] {
        &self.generators
    }

    /// `γ_a` for a letter `a ∈ 0..2m`.
    pub fn letter(&self, a: usize) -> &Moebius<T> {
        &self.letters[a]
    }

    /// The inverse branch `γ_a⁻¹`, mapping admissible disks into `D_a`.
    pub fn branch(&self, a: usize) -> &Moebius<T> {
        &self.branches[a]
    }

    pub fn inverse_letter(&self, a: usize) -> usize {
        let m = self.rank();
        (a + m) % (2 * m)
    }

    /// Whether `γ_a⁻¹` may act on `D_j`.
    pub fn admissible(&self, a: usize, j: usize) -> bool {
        a != self.inverse_letter(j)
    }

    /// `γ_α = γ_{α₁} ⋯ γ_{α_N}`.
    pub fn word_matrix(&self, word: &[usize]) -> Moebius<T> {
        word.iter()
            .fold(Moebius::identity(), |acc, &a| acc.compose(&self.letters[a]))
    }

    pub fn min_gap(&self) -> T {
        let mut gap = T::infinity();
        for i in 0..self.disks.len() {
            for j in (i + 1)..self.disks.len() {
                gap = gap.min(self.disks[i].gap(&self.disks[j]));
            }
        }
        gap
    }

    pub fn validate(&self) -> std::result::Result<ValidationReport, ValidationFailure> {
        let m = self.rank();
        let n = self.disks.len();
        if n != 2 * m {
            return Err(ValidationFailure::Structure {
                detail: format!("{n} disks for {m} generators"),
            });
        }
        let scale = self
            .disks
            .iter()
            .fold(T::one(), |acc, d| acc.max(d.radius).max(d.center.abs()));
        let margin = geometric_tol::<T>() * scale;
        let mut min_gap = T::infinity();
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = self.disks[i].gap(&self.disks[j]);
                if !(gap > margin) {
                    return Err(ValidationFailure::Disjointness {
                        first: i,
                        second: j,
                        gap: gap.as_f64(),
                    });
                }
                min_gap = min_gap.min(gap);
            }
        }

        let tol = geometric_tol::<T>();
        let three_points = [0.0, 2.0 / 3.0, 4.0 / 3.0].map(|t| T::lit(t) * T::PI());
        for (j, g) in self.generators.iter().enumerate() {
            let src = self.disks[j];
            let dst = self.disks[j + m];
            let dst_c = Complex::new(dst.center, T::zero());
            for &angle in &three_points {
                let z = Complex::new(src.center, T::zero())
                    + Complex::from_polar(src.radius, angle);
                let w = match g.apply_finite(z) {
                    Some(w) => w,
                    None => {
                        return Err(ValidationFailure::Mapping {
                            generator: j,
                            detail: "boundary point sent to infinity".into(),
                        })
                    }
                };
                let off = ((w - dst_c).norm() - dst.radius).abs();
                if off > tol * dst.radius {
                    return Err(ValidationFailure::Mapping {
                        generator: j,
                        detail: format!(
                            "boundary image misses the target circle by {:e}",
                            off.as_f64()
                        ),
                    });
                }
            }
            let outside = Complex::new(src.center, T::lit(2.0) * src.radius);
            match g.apply_finite(outside) {
                Some(w) if (w - dst_c).norm() < dst.radius * (T::one() - tol) => {}
                _ => {
                    return Err(ValidationFailure::Mapping {
                        generator: j,
                        detail: "exterior test point not mapped into the target disk".into(),
                    })
                }
            }
        }

        for (j, g) in self.generators.iter().enumerate() {
            if !g.is_hyperbolic() {
                return Err(ValidationFailure::NotHyperbolic {
                    generator: j,
                    trace: g.trace().abs().as_f64(),
                });
            }
        }

        Ok(ValidationReport {
            min_gap: min_gap.as_f64(),
            theta: self.contraction_bound().ok().map(|t| t.as_f64()),
        })
    }

    /// Validates and converts any failure into an [`Error`].
    pub fn validated(self) -> Result<Self> {
        self.validate().map_err(Error::Validation)?;
        Ok(self)
    }

    /// `θ = max sup_{D_j} |(γ_a⁻¹)′|` over admissible pairs; a certificate of uniform contraction when `θ < 1`.
    pub fn contraction_bound(&self) -> Result<T> {
        let mut theta = T::zero();
        for a in 0..self.alphabet_size() {
            for j in 0..self.alphabet_size() {
                if !self.admissible(a, j) {
                    continue;
                }
                let sup = self.disks[j]
                    .sup_derivative(&self.branches[a])
                    .ok_or(Error::BranchPoleInDisk { disk: j })?;
                theta = theta.max(sup);
            }
        }
        if theta < T::one() {
            Ok(theta)
        } else {
            Err(Error::NotContracting {
                theta: theta.as_f64(),
            })
        }
    }

    /// Conjugates the whole construction by `h`; `h` must keep every disk bounded.
    pub fn conjugate(&self, h: &Moebius<T>) -> Result<Self> {
        let disks = self
            .disks
            .iter()
            .enumerate()
            .map(|(j, d)| d.image_under(h).ok_or(Error::BranchPoleInDisk { disk: j }))
            .collect::<Result<Vec<_>>>()?;
        let gens = self.generators.iter().map(|g| g.conjugate_by(h)).collect();
        SchottkyScheme::new(disks, gens)
    }

    /// The Schottky subgroup generated by the listed generators (0-based, `< m`).
    pub fn sub_scheme(&self, keep: &[usize]) -> Result<Self> {
        let m = self.rank();
        if keep.is_empty() || keep.iter().any(|&k| k >= m) {
            return Err(Error::InvalidParameter("invalid generator selection".into()));
        }
        let mut disks: Vec<_> = keep.iter().map(|&k| self.disks[k]).collect();
        disks.extend(keep.iter().map(|&k| self.disks[k + m]));
        let gens = keep.iter().map(|&k| self.generators[k]).collect();
        SchottkyScheme::new(disks, gens)
    }

    pub fn cast<U: Real>(&self) -> Result<SchottkyScheme<U>> {
        SchottkyScheme::new(
            self.disks.iter().map(|d| d.cast()).collect(),
            self.generators.iter().map(|g| g.cast()).collect(),
        )
    }

    /// Builds from `(center, half_width, length)` axis data; generator `k`
    /// has fixed points `center ± half_width`, and its disk pair are its isometric circles.
    pub fn from_axes(axes: &[(T, T, T)]) -> Result<Self> {
        let mut sources = Vec::with_capacity(axes.len());
        let mut targets = Vec::with_capacity(axes.len());
        let mut gens = Vec::with_capacity(axes.len());
        for &(center, half_width, ell) in axes {
            let g = hyperbolic_with_axis(center, half_width, ell)?;
            let h = ell / T::lit(2.0);
            let offset = half_width / h.tanh();
            let radius = half_width / h.sinh();
            sources.push(Disk::new(center - offset, radius)?);
            targets.push(Disk::new(center + offset, radius)?);
            gens.push(g);
        }
        sources.extend(targets);
        SchottkyScheme::new(sources, gens)
    }
}

impl SchottkyScheme<f64> {
    pub fn to_json(&self) -> Result<String> {
        let file = SchemeFile {
            m: self.rank(),
            disks: self.disks.clone(),
            generators: self.generators.iter().map(|g| g.rows()).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SchemeFile = serde_json::from_str(text)?;
        if file.generators.len() != file.m {
            return Err(Error::InvalidParameter(format!(
                "m = {} but {} generators listed",
                file.m,
                file.generators.len()
            )));
        }
        let disks = file
            .disks
            .into_iter()
            .map(|d| Disk::new(d.center, d.radius))
            .collect::<Result<Vec<_>>>()?;
        let gens = file
            .generators
            .into_iter()
            .map(Moebius::from_rows)
            .collect::<Result<Vec<_>>>()?;
        SchottkyScheme::new(disks, gens)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Stable fingerprint of the scheme data.
    pub fn fingerprint(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for d in &self.disks {
            d.center.to_bits().hash(&mut h);
            d.radius.to_bits().hash(&mut h);
        }
        for g in &self.generators {
            for x in [g.a, g.b, g.c, g.d] {
                x.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }
}

/// Hyperbolic cylinder `⟨z ↦ e^ℓ z⟩\ℍ` in conjugated form with fixed points ±1.
pub fn cylinder_scheme<T: Real>(ell: T) -> Result<SchottkyScheme<T>> {
    if !(ell > T::zero()) {
        return Err(Error::InvalidParameter("cylinder length must be positive".into()));
    }
    SchottkyScheme::from_axes(&[(T::zero(), T::one(), ell)])
}

/// Rank-two fixture: two unit-width axes centred at `∓separation/2`.
pub fn pants_scheme<T: Real>(ell1: T, ell2: T, separation: T) -> Result<SchottkyScheme<T>> {
    if !(ell1 > T::zero()) || !(ell2 > T::zero()) || separation < T::zero() {
        return Err(Error::InvalidParameter(
            "lengths must be positive and separation nonnegative".into(),
        ));
    }
    let half = separation / T::lit(2.0);
    let scheme = SchottkyScheme::from_axes(&[(-half, T::one(), ell1), (half, T::one(), ell2)])?;
    if let Err(f) = scheme.validate() {
        return Err(Error::Infeasible(f.to_string()));
    }
    Ok(scheme)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_disks() {
        let s = cylinder_scheme(2.0f64).unwrap();
        let d = s.disks();
        assert!((d[0].center + 1.0f64.tanh().recip()).abs() < 1e-12);
        assert!((d[0].center + 1.313_035_285_499_331).abs() < 1e-12);
        assert!((d[1].center - 1.313_035_285_499_331).abs() < 1e-12);
        assert!((d[0].radius - 0.850_918_128_239_321_5).abs() < 1e-12);
        assert!((s.generators()[0].displacement_length().unwrap() - 2.0).abs() < 1e-12);
        let report = s.validate().unwrap();
        assert!(report.min_gap > 0.0);
        assert!(report.theta.unwrap() < 1.0);
    }

    #[test]
    fn degenerate_cylinder_fails() {
        let s = cylinder_scheme(1e-10f64).unwrap();
        assert!(matches!(s.validate(), Err(ValidationFailure::Disjointness { .. })));
        assert!(cylinder_scheme(0.0f64).is_err());
        assert!(cylinder_scheme(-1.0f64).is_err());
    }

    #[test]
    fn overlapping_disks_fail() {
        let s = cylinder_scheme(2.0f64).unwrap();
        let mut disks = s.disks().to_vec();
        disks[1].center = disks[0].center + 0.5;
        let bad = SchottkyScheme::new(disks, s.generators().to_vec()).unwrap();
        assert!(matches!(bad.validate(), Err(ValidationFailure::Disjointness { .. })));
    }

    #[test]
    fn identity_generator_fails_mapping() {
        let s = cylinder_scheme(2.0f64).unwrap();
        let bad = SchottkyScheme::new(s.disks().to_vec(), vec![Moebius::identity()]).unwrap();
        assert!(matches!(bad.validate(), Err(ValidationFailure::Mapping { .. })));
    }

    #[test]
    fn pants_feasibility_and_symmetry() {
        assert!(matches!(pants_scheme(2.0, 2.0, 0.0), Err(Error::Infeasible(_))));
        let s = pants_scheme(2.0f64, 2.0, 8.0).unwrap();
        s.validate().unwrap();
        let mut centers: Vec<f64> = s.disks().iter().map(|d| d.center).collect();
        let mut mirrored: Vec<f64> = centers.iter().map(|c| -c).collect();
        centers.sort_by(f64::total_cmp);
        mirrored.sort_by(f64::total_cmp);
        for (a, b) in centers.iter().zip(&mirrored) {
            assert!((a - b).abs() < 1e-12);
        }
        for g in s.generators() {
            assert!((g.displacement_length().unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_decays_with_length() {
        let t2 = cylinder_scheme(2.0f64).unwrap().contraction_bound().unwrap();
        let t8 = cylinder_scheme(8.0f64).unwrap().contraction_bound().unwrap();
        let t16 = cylinder_scheme(16.0f64).unwrap().contraction_bound().unwrap();
        assert!(t2 < 1.0 && t8 < t2 && t16 < t8 && t16 < 1e-5);
    }

    #[test]
    fn branches_map_into_owning_disk() {
        let s = pants_scheme(2.0f64, 2.0, 8.0).unwrap();
        for a in 0..4 {
            for j in 0..4 {
                if !s.admissible(a, j) {
                    continue;
                }
                let img = s.disk(j).image_under(s.branch(a)).unwrap();
                assert!(s.disk(a).contains_disk(&img, 0.0), "a={a} j={j}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let s = pants_scheme(2.0f64, 3.0, 9.0).unwrap();
        let back = SchottkyScheme::from_json(&s.to_json().unwrap()).unwrap();
        assert_eq!(back.rank(), 2);
        for (a, b) in s.disks().iter().zip(back.disks()) {
            assert_eq!(a, b);
        }
        for (a, b) in s.generators().iter().zip(back.generators()) {
            assert!(a.approx_eq(b, 1e-12), "{a:?} {b:?}");
        }
        let bad = r#"{"m": 2, "disks": [], "generators": [[[1,0],[0,1]]]}"#;
        assert!(SchottkyScheme::from_json(bad).is_err());
    }

    #[test]
    fn single_precision_scheme_validates() {
        let s = cylinder_scheme(2.0f32).unwrap();
        s.validate().unwrap();
        assert!(s.contraction_bound().unwrap() < 0.5);
    }
}
