use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::representations::action::{AbelianCover, CosetAction};

/// A finite-dimensional unitary representation of the free group on `m` generators.
#[derive(Clone, Debug)]
pub struct UnitaryRep {
    dim: usize,
    rank: usize,
    images: Vec<DMatrix<Complex64>>,
    action: Option<CosetAction>,
    trivial: bool,
}

const UNITARY_TOL: f64 = 1e-10;

impl UnitaryRep {
    /// `𝟙_d`: every generator acts as the identity on `ℂ^d`.
    pub fn trivial(rank: usize, dim: usize) -> Self {
        UnitaryRep {
            dim,
            rank,
            images: vec![DMatrix::identity(dim, dim); 2 * rank],
            action: None,
            trivial: true,
        }
    }

    /// Builds from generator images; inverse letters get the adjoints.
    pub fn from_matrices(images: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let rank = images.len();
        if rank == 0 {
            return Err(Error::InvalidParameter("no generator images".into()));
        }
        let dim = images[0].nrows();
        for u in &images {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: u.nrows().max(u.ncols()),
                });
            }
            let defect = (u * u.adjoint() - DMatrix::<Complex64>::identity(dim, dim))
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            if defect > UNITARY_TOL {
                return Err(Error::InvalidParameter(format!(
                    "generator image is not unitary (defect {defect:e})"
                )));
            }
        }
        let mut all = images.clone();
        all.extend(images.iter().map(|u| u.adjoint()));
        Ok(UnitaryRep {
            dim,
            rank,
            images: all,
            action: None,
            trivial: false,
        })
    }

    /// One-dimensional character `γ_j ↦ values[j]` (unit complex numbers).
    pub fn character(values: &[Complex64]) -> Result<Self> {
        Self::from_matrices(values.iter().map(|&v| DMatrix::from_element(1, 1, v)).collect())
    }

    /// All characters of an abelian deck group.
    pub fn abelian_characters(cover: &AbelianCover) -> Result<Vec<Self>> {
        cover.characters().iter().map(|v| Self::character(v)).collect()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn action(&self) -> Option<&CosetAction> {
        self.action.as_ref()
    }

    /// `ϱ(γ_a)` for any of the `2m` letters.
    pub fn image(&self, a: usize) -> &DMatrix<Complex64> {
        &self.images[a]
    }

    pub fn word_matrix(&self, word: &[usize]) -> DMatrix<Complex64> {
        word.iter()
            .fold(DMatrix::identity(self.dim, self.dim), |acc, &a| acc * &self.images[a])
    }

    pub fn trace(&self, word: &[usize]) -> Complex64 {
        match &self.action {
            Some(a) => Complex64::new(a.character(word) as f64, 0.0),
            None if self.trivial => Complex64::new(self.dim as f64, 0.0),
            None => self.word_matrix(word).trace(),
        }
    }

    /// Eigenvalues of `ϱ(w)`; exact roots of unity for permutation representations.
    pub fn word_eigenvalues(&self, word: &[usize]) -> Vec<Complex64> {
        if self.trivial {
            return vec![Complex64::new(1.0, 0.0); self.dim];
        }
        if let Some(a) = &self.action {
            let perm = a.word_perm(word);
            let mut seen = vec![false; perm.len()];
            let mut out = Vec::with_capacity(perm.len());
            for start in 0..perm.len() {
                if seen[start] {
                    continue;
                }
                let mut len = 0;
                let mut x = start;
                while !seen[x] {
                    seen[x] = true;
                    x = perm[x];
                    len += 1;
                }
                for k in 0..len {
                    out.push(Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * k as f64 / len as f64,
                    ));
                }
            }
            return out;
        }
        if self.dim == 1 {
            return vec![self.word_matrix(word)[(0, 0)]];
        }
        let m = self.word_matrix(word);
        let schur = nalgebra::Schur::new(m);
        let (_, t) = schur.unpack();
        (0..self.dim).map(|i| t[(i, i)]).collect()
    }
}

/// `λ = Ind 1`: the permutation representation on cosets, with
/// `P e_x = e_{σ(x)}` so that word matrices multiply like word permutations.
pub fn induced_permutation_rep(action: &CosetAction) -> UnitaryRep {
    let n = action.degree();
    let images = (0..2 * action.rank())
        .map(|a| {
            let p = action.letter_perm(a);
            let mut m = DMatrix::zeros(n, n);
            for (x, &y) in p.iter().enumerate() {
                m[(y, x)] = Complex64::new(1.0, 0.0);
            }
            m
        })
        .collect();
    UnitaryRep {
        dim: n,
        rank: action.rank(),
        images,
        action: Some(action.clone()),
        trivial: n == 1,
    }
}
