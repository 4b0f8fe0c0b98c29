//! Reduced words in the free generators and conjugacy-class enumeration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scheme::SchottkyScheme;

/// A word `γ_{α₁}⋯γ_{α_N}` over the 0-based alphabet `0..2m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word {
    pub letters: Vec<usize>,
    pub rank: usize,
    pub reduced: bool,
}

#[inline]
pub(crate) fn inv(a: usize, m: usize) -> usize {
    (a + m) % (2 * m)
}

pub fn is_reduced(letters: &[usize], m: usize) -> bool {
    letters.windows(2).all(|w| w[1] != inv(w[0], m))
}

pub fn is_cyclically_reduced(letters: &[usize], m: usize) -> bool {
    is_reduced(letters, m)
        && match (letters.first(), letters.last()) {
            (Some(&f), Some(&l)) => letters.len() == 1 || f != inv(l, m),
            _ => true,
        }
}

/// Lexicographically minimal rotation test.
pub fn is_minimal_rotation(letters: &[usize]) -> bool {
    let n = letters.len();
    (1..n).all(|r| {
        for k in 0..n {
            let a = letters[(k + r) % n];
            let b = letters[k];
            if a != b {
                return a > b;
            }
        }
        true
    })
}

/// A word is primitive (not a proper power) iff no nontrivial rotation fixes it.
pub fn is_aperiodic(letters: &[usize]) -> bool {
    let n = letters.len();
    (1..n).filter(|r| n % r == 0).all(|r| (0..n).any(|k| letters[k] != letters[(k + r) % n]))
}

impl Word {
    pub fn new(letters: Vec<usize>, rank: usize) -> Result<Self> {
        if rank == 0 || letters.iter().any(|&a| a >= 2 * rank) {
            return Err(Error::InvalidParameter("letter outside the alphabet".into()));
        }
        let reduced = is_reduced(&letters, rank);
        Ok(Word {
            letters,
            rank,
            reduced,
        })
    }

    pub fn empty(rank: usize) -> Self {
        Word {
            letters: Vec::new(),
            rank,
            reduced: true,
        }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        let letters = self.letters.iter().rev().map(|&a| inv(a, self.rank)).collect();
        Word {
            letters,
            rank: self.rank,
            reduced: self.reduced,
        }
    }

    /// Free reduction.
    pub fn reduce(&self) -> Self {
        let mut out: Vec<usize> = Vec::with_capacity(self.letters.len());
        for &a in &self.letters {
            if out.last() == Some(&inv(a, self.rank)) {
                out.pop();
            } else {
                out.push(a);
            }
        }
        Word {
            letters: out,
            rank: self.rank,
            reduced: true,
        }
    }

    /// Reduced product `self · other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            letters,
            rank: self.rank,
            reduced: false,
        }
        .reduce()
    }

    /// Strips inverse pairs from both ends; the result represents the same conjugacy class.
    pub fn cyclic_reduction(&self) -> Self {
        let red = self.reduce();
        let l = &red.letters;
        let (mut i, mut j) = (0usize, l.len());
        while j >= i + 2 && l[i] == inv(l[j - 1], self.rank) {
            i += 1;
            j -= 1;
        }
        Word {
            letters: l[i..j].to_vec(),
            rank: self.rank,
            reduced: true,
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        is_cyclically_reduced(&self.letters, self.rank)
    }

    pub fn power(&self, k: usize) -> Self {
        let mut letters = Vec::with_capacity(self.letters.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        Word {
            letters,
            rank: self.rank,
            reduced: false,
        }
        .reduce()
    }

    /// Lexicographically minimal rotation of the cyclic reduction.
    pub fn class_representative(&self) -> Self {
        let cr = self.cyclic_reduction();
        let n = cr.letters.len();
        let best = (0..n)
            .map(|r| {
                let mut v = cr.letters[r..].to_vec();
                v.extend_from_slice(&cr.letters[..r]);
                v
            })
            .min()
            .unwrap_or_default();
        Word {
            letters: best,
            rank: self.rank,
            reduced: true,
        }
    }
}

/// Depth-first enumeration of reduced words of length `n`; `first` restricts the
/// first letter (`W_N^j` uses first letters `≠ j + m`).
pub fn for_each_reduced_word<F: FnMut(&[usize])>(
    m: usize,
    n: usize,
    allow_first: impl Fn(usize) -> bool,
    mut f: F,
) {
    fn rec<F: FnMut(&[usize])>(m: usize, n: usize, buf: &mut Vec<usize>, f: &mut F) {
        if buf.len() == n {
            f(buf);
            return;
        }
        let last = *buf.last().expect("nonempty");
        for a in 0..2 * m {
            if a == inv(last, m) {
                continue;
            }
            buf.push(a);
            rec(m, n, buf, f);
            buf.pop();
        }
    }
    if n == 0 {
        f(&[]);
        return;
    }
    let mut buf = Vec::with_capacity(n);
    for a in 0..2 * m {
        if !allow_first(a) {
            continue;
        }
        buf.push(a);
        rec(m, n, &mut buf, &mut f);
        buf.pop();
    }
}

/// `W_N`, or `W_N^j` when `first_constraint = Some(j)`.
pub fn enumerate_words(m: usize, n: usize, first_constraint: Option<usize>) -> Vec<Word> {
    let mut out = Vec::new();
    for_each_reduced_word(
        m,
        n,
        |a| first_constraint.map_or(true, |j| a != inv(j, m)),
        |w| {
            out.push(Word {
                letters: w.to_vec(),
                rank: m,
                reduced: true,
            })
        },
    );
    out
}

/// `|W_N| = 2m(2m−1)^{N−1}`.
pub fn reduced_word_count(m: usize, n: usize) -> u64 {
    if n == 0 {
        return 1;
    }
    2 * m as u64 * (2 * m as u64 - 1).pow(n as u32 - 1)
}

/// Calls `f` on every cyclically reduced word of length `n` that is the minimal
/// rotation of its class; `primitive_only` drops proper powers.
pub fn for_each_class<F: FnMut(&[usize])>(m: usize, n: usize, primitive_only: bool, mut f: F) {
    for_each_reduced_word(m, n, |_| true, |w| {
        if is_cyclically_reduced(w, m)
            && is_minimal_rotation(w)
            && (!primitive_only || is_aperiodic(w))
        {
            f(w);
        }
    });
}

/// Primitive conjugacy-class representatives (both orientations) with word length ≤ `max_len`.
pub fn primitive_classes(m: usize, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for n in 1..=max_len {
        for_each_class(m, n, true, |w| {
            out.push(Word {
                letters: w.to_vec(),
                rank: m,
                reduced: true,
            })
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSearch {
    pub ell0: f64,
    pub word: Vec<usize>,
    pub certified: bool,
    pub max_len: usize,
}

/// Shortest closed geodesic among classes of word length ≤ `max_len`, optionally
/// restricted by `filter`. Certified when `max_len·log(1/θ)` exceeds the minimum found,
/// since every class satisfies `ℓ ≥ WL·log(1/θ)`.
pub fn shortest_geodesic_filtered<T: Real>(
    scheme: &SchottkyScheme<T>,
    max_len: usize,
    mut filter: impl FnMut(&[usize]) -> bool,
) -> Result<GeodesicSearch> {
    if max_len == 0 {
        return Err(Error::InvalidParameter("max_len must be at least 1".into()));
    }
    let m = scheme.rank();
    let mut best = (f64::INFINITY, Vec::new());
    for n in 1..=max_len {
        for_each_class(m, n, true, |w| {
            if !filter(w) {
                return;
            }
            if let Ok(l) = scheme.word_matrix(w).displacement_length() {
                let l = l.as_f64();
                if l < best.0 {
                    best = (l, w.to_vec());
                }
            }
        });
    }
    let certified = match scheme.contraction_bound() {
        Ok(theta) => best.0.is_finite() && max_len as f64 * (1.0 / theta.as_f64()).ln() > best.0,
        Err(_) => false,
    };
    Ok(GeodesicSearch {
        ell0: best.0,
        word: best.1,
        certified,
        max_len,
    })
}

pub fn shortest_geodesic<T: Real>(scheme: &SchottkyScheme<T>, max_len: usize) -> Result<GeodesicSearch> {
    shortest_geodesic_filtered(scheme, max_len, |_| true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{cylinder_scheme, pants_scheme};

    #[test]
    fn word_counts() {
        assert_eq!(enumerate_words(2, 3, None).len(), 36);
        let rank1 = enumerate_words(1, 5, None);
        assert_eq!(rank1.len(), 2);
        assert!(rank1.iter().any(|w| w.letters == vec![0; 5]));
        assert!(rank1.iter().any(|w| w.letters == vec![1; 5]));
        assert_eq!(enumerate_words(2, 2, Some(0)).len(), 9);
        for m in 1..=3 {
            for n in 1..=8 {
                assert_eq!(enumerate_words(m, n, None).len() as u64, reduced_word_count(m, n));
                for j in 0..2 * m {
                    assert_eq!(
                        enumerate_words(m, n, Some(j)).len() as u64,
                        (2 * m as u64 - 1).pow(n as u32)
                    );
                }
            }
        }
    }

    #[test]
    fn reduction_and_classes() {
        let w = Word::new(vec![0, 2, 1, 3, 0], 2).unwrap();
        assert!(!w.reduced);
        assert_eq!(w.reduce().letters, vec![0]);
        let c = Word::new(vec![2, 1, 0], 2).unwrap();
        assert_eq!(c.cyclic_reduction().letters, vec![1]);
        let r = Word::new(vec![1, 0, 0], 2).unwrap();
        assert_eq!(r.class_representative().letters, vec![0, 0, 1]);
        assert!(is_aperiodic(&[0, 0, 1]));
        assert!(!is_aperiodic(&[0, 1, 0, 1]));
    }

    #[test]
    fn rank_one_classes_are_generator_and_inverse() {
        let classes = primitive_classes(1, 6);
        assert_eq!(classes.len(), 2);
    }

    #[test]
    fn cylinder_shortest_geodesic() {
        let s = cylinder_scheme(2.0f64).unwrap();
        let g = shortest_geodesic(&s, 3).unwrap();
        assert!((g.ell0 - 2.0).abs() < 1e-12);
        assert!(g.certified);
    }

    #[test]
    fn pants_shortest_geodesic_is_a_generator() {
        let s = pants_scheme(2.0f64, 2.0, 8.0).unwrap();
        let g = shortest_geodesic(&s, 4).unwrap();
        assert!((g.ell0 - 2.0).abs() < 1e-9);
        assert_eq!(g.word.len(), 1);
        assert!(g.certified);
    }

    #[test]
    fn uncertified_when_contraction_is_weak() {
        // nearly touching disks: θ close to 1
        let s = cylinder_scheme(0.05f64).unwrap();
        let g = shortest_geodesic(&s, 1).unwrap();
        assert!(!g.certified);
    }
}
