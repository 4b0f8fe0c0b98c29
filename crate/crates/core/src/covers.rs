//! Invariants of finite covers: shortest geodesics, 0-volume, congruence bounds, girth, factorization.

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::representations::{
    congruence_action, induced_permutation_rep, AbelianCover, CongruenceKind, CosetAction, IntMatrix, UnitaryRep,
};
use crate::resonance::zeta::{TransferZeta, ZetaFunction};
use crate::scheme::SchottkyScheme;
use crate::words::{for_each_class, for_each_reduced_word, inv, reduced_word_count, shortest_geodesic};

const WORD_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct CoverGeodesic {
    pub ell0: f64,
    /// Class representative in the base group; a power of a primitive class when the
    /// cover unwraps it.
    pub word: Vec<usize>,
    /// No class with word length above `max_len` can be shorter.
    pub certified: bool,
    pub max_len: usize,
    /// Largest `WL(γ)/ℓ(γ)` over the enumerated classes of the cover.
    pub wl_per_length: f64,
}

fn check_budget(m: usize, n: usize) -> Result<()> {
    if reduced_word_count(m, n) > WORD_BUDGET {
        return Err(Error::BudgetExceeded(format!("{} words of length {n}", reduced_word_count(m, n))));
    }
    Ok(())
}

/// `ℓ₀(X̃)`: the shortest class of `Γ` with word length `≤ max_len` that fixes a coset.
/// Such classes, conjugated into `Γ̃`, are exactly the closed geodesics of the cover.
pub fn l0_cover(scheme: &SchottkyScheme<f64>, action: &CosetAction, max_len: usize) -> Result<CoverGeodesic> {
    if max_len == 0 {
        return Err(Error::InvalidParameter("max_len must be at least 1".into()));
    }
    if action.rank() != scheme.rank() {
        return Err(Error::DimensionMismatch {
            expected: scheme.rank(),
            got: action.rank(),
        });
    }
    let m = scheme.rank();
    let mut best = (f64::INFINITY, Vec::new());
    let mut ratio: f64 = 0.0;
    let mut err = None;
    for n in 1..=max_len {
        check_budget(m, n)?;
        for_each_class(m, n, false, |w| {
            if action.character(w) == 0 {
                return;
            }
            match scheme.word_matrix(w).displacement_length() {
                Ok(l) => {
                    ratio = ratio.max(n as f64 / l);
                    if l < best.0 {
                        best = (l, w.to_vec());
                    }
                }
                Err(e) => err = Some(e),
            }
        });
    }
    if let Some(e) = err {
        return Err(e);
    }
    let theta = scheme.contraction_bound()?;
    Ok(CoverGeodesic {
        ell0: best.0,
        word: best.1,
        certified: best.0.is_finite() && max_len as f64 * (1.0 / theta).ln() > best.0,
        max_len,
        wl_per_length: ratio,
    })
}

/// `zvol = 2π(m − 1)` for a rank-`m` surface, times the covering degree.
pub fn zero_volume(scheme: &SchottkyScheme<f64>, degree: usize) -> f64 {
    2.0 * PI * (scheme.rank() as f64 - 1.0) * degree as f64
}

/// Girth of the labelled Cayley graph of a regular cover's deck group: one edge `g → π(γ_j)g` per
/// vertex and generator, so a generator of order 2 closes a 2-cycle. BFS from the identity: the
/// girth is the least `d(u) + d(v) + 1` over edges outside the BFS tree, which equals the length
/// of the shortest nontrivial reduced word in `Γ̃`.
pub fn girth(action: &CosetAction) -> Result<usize> {
    if !action.is_regular() {
        return Err(Error::NonRegular);
    }
    let n = action.degree();
    let m = action.rank();
    let mut dist = vec![usize::MAX; n];
    // letter used to enter each vertex
    let mut via = vec![usize::MAX; n];
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    let mut best = usize::MAX;
    while let Some(u) = queue.pop_front() {
        if 2 * dist[u] >= best {
            break;
        }
        for a in 0..2 * m {
            if via[u] != usize::MAX && a == inv(via[u], m) {
                continue;
            }
            let v = action.letter_perm(a)[u];
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                via[v] = a;
                queue.push_back(v);
            } else {
                best = best.min(dist[u] + dist[v] + 1);
            }
        }
    }
    Ok(best)
}

/// Girth of the simple Cayley graph on the symmetric set `π(S)`: parallel edges and loops
/// collapse, so relations such as `π(γ)² = 1` do not count. `None` for a forest.
pub fn simple_girth(action: &CosetAction) -> Result<Option<usize>> {
    if !action.is_regular() {
        return Err(Error::NonRegular);
    }
    let n = action.degree();
    let m = action.rank();
    let neighbours = |u: usize| {
        let mut v: Vec<usize> = (0..2 * m).map(|a| action.letter_perm(a)[u]).filter(|&v| v != u).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    let mut best = usize::MAX;
    while let Some(u) = queue.pop_front() {
        if 2 * dist[u] >= best {
            break;
        }
        for v in neighbours(u) {
            if v == parent[u] {
                continue;
            }
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                parent[v] = u;
                queue.push_back(v);
            } else {
                best = best.min(dist[u] + dist[v] + 1);
            }
        }
    }
    Ok((best != usize::MAX).then_some(best))
}

/// `min{WL(w) : w ∈ Γ̃ ∖ {id}}` by exhaustive enumeration of reduced words up to `max_len`.
pub fn min_subgroup_word_length(action: &CosetAction, max_len: usize) -> Result<Option<usize>> {
    let m = action.rank();
    for n in 1..=max_len {
        check_budget(m, n)?;
        let mut found = false;
        for_each_reduced_word(m, n, |_| true, |w| {
            if !found && action.in_subgroup(w) {
                found = true;
            }
        });
        if found {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverInvariants {
    pub degree: usize,
    pub ell0: f64,
    pub ell0_certified: bool,
    pub ell0_word: Vec<usize>,
    pub base_ell0: f64,
    pub zvol: f64,
    pub base_zvol: f64,
    /// Labelled Cayley-graph girth, defined for regular covers.
    pub girth: Option<usize>,
    /// Simple-graph girth; `None` also when the graph is a forest.
    pub simple_girth: Option<usize>,
    /// `None` when no subgroup word has length `≤ max_word_len`.
    pub min_subgroup_word_length: Option<usize>,
    pub max_word_len: usize,
    /// Empirical `max WL/ℓ` over the enumerated classes; never used as a certificate.
    pub wl_per_length: f64,
    /// `girth·log(1/θ)`, a lower bound for `ℓ₀` on regular covers.
    pub girth_length_bound: Option<f64>,
}

pub fn cover_invariants(scheme: &SchottkyScheme<f64>, action: &CosetAction, max_word_len: usize) -> Result<CoverInvariants> {
    let cover = l0_cover(scheme, action, max_word_len)?;
    let base = shortest_geodesic(scheme, max_word_len)?;
    let girth = if action.is_regular() { Some(girth(action)?) } else { None };
    let theta = scheme.contraction_bound()?;
    Ok(CoverInvariants {
        degree: action.degree(),
        ell0: cover.ell0,
        ell0_certified: cover.certified,
        ell0_word: cover.word,
        base_ell0: base.ell0,
        zvol: zero_volume(scheme, action.degree()),
        base_zvol: zero_volume(scheme, 1),
        girth,
        simple_girth: if action.is_regular() { simple_girth(action)? } else { None },
        min_subgroup_word_length: min_subgroup_word_length(action, max_word_len)?,
        max_word_len,
        wl_per_length: cover.wl_per_length,
        girth_length_bound: girth.map(|g| g as f64 * (1.0 / theta).ln()),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceL0 {
    pub q: u64,
    pub degree: usize,
    pub ell0: f64,
    pub certified: bool,
    /// `log(q/(4√2))`.
    pub bound: f64,
    pub holds: bool,
    /// `q = 1` is the trivial cover.
    pub skipped: bool,
}

/// `ℓ₀` of the `Γ₀(q)` cover against the lower bound `log(q/(4√2))`.
pub fn l0_congruence_check(
    scheme: &SchottkyScheme<f64>,
    gens: &[IntMatrix],
    q: u64,
    max_len: usize,
) -> Result<CongruenceL0> {
    let bound = (q as f64 / (4.0 * 2f64.sqrt())).ln();
    if q == 1 {
        return Ok(CongruenceL0 {
            q,
            degree: 1,
            ell0: f64::NAN,
            certified: false,
            bound,
            holds: true,
            skipped: true,
        });
    }
    let cover = congruence_action(gens, q, CongruenceKind::Gamma0)?;
    let g = l0_cover(scheme, &cover.action, max_len)?;
    Ok(CongruenceL0 {
        q,
        degree: cover.degree(),
        ell0: g.ell0,
        certified: g.certified,
        bound,
        holds: g.ell0 >= bound,
        skipped: false,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    pub degree: usize,
    pub characters: usize,
    /// `(s, |det_λ − ∏_χ det_χ| / |det_λ|)` per sample.
    pub errors: Vec<(Complex64, f64)>,
    pub max_relative_error: f64,
}

/// `ln` of each side's ratio turned into a relative error: `|1 − exp(Σ log D_χ − log D_λ)|`.
fn relative_from_logs(lhs: Complex64, rhs: Complex64) -> f64 {
    (Complex64::new(1.0, 0.0) - (rhs - lhs).exp()).norm()
}

/// Compares the determinant twisted by the regular representation of an abelian group with the
/// product of its character-twisted determinants.
pub fn factorization_check(
    scheme: &SchottkyScheme<f64>,
    group: &AbelianCover,
    samples: &[Complex64],
    q: usize,
    level: usize,
) -> Result<FactorizationReport> {
    let regular = TransferZeta::new(scheme.clone(), induced_permutation_rep(&group.action), q, level)?;
    let chars = UnitaryRep::abelian_characters(group)?
        .into_iter()
        .map(|rep| TransferZeta::new(scheme.clone(), rep, q, level))
        .collect::<Result<Vec<_>>>()?;
    let mut errors = Vec::with_capacity(samples.len());
    for &s in samples {
        let lhs = regular.eval(s)?.log;
        let mut rhs = Complex64::new(0.0, 0.0);
        for c in &chars {
            rhs += c.eval(s)?.log;
        }
        errors.push((s, relative_from_logs(lhs, rhs)));
    }
    Ok(FactorizationReport {
        degree: group.order(),
        characters: chars.len(),
        max_relative_error: errors.iter().map(|e| e.1).fold(0.0, f64::max),
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::{congruence::search_integral_fixture, integral_scheme, regular_action};
    use crate::scheme::{cylinder_scheme, pants_scheme};
    use crate::transfer::euler::cylinder_zeta_log;

    #[test]
    fn cylinder_cyclic_cover_unwraps_the_geodesic() {
        let sch = cylinder_scheme(2.0).unwrap();
        for k in 1..=4 {
            let cover = AbelianCover::cyclic(k, &[1]).unwrap();
            let g = l0_cover(&sch, &cover.action, 6).unwrap();
            assert!((g.ell0 - 2.0 * k as f64).abs() < 1e-12, "{k} {}", g.ell0);
        }
    }

    #[test]
    fn trivial_cover_matches_base() {
        let sch = pants_scheme(2.0, 2.5, 8.0).unwrap();
        let g = l0_cover(&sch, &CosetAction::trivial(2), 4).unwrap();
        let base = shortest_geodesic(&sch, 4).unwrap();
        assert_eq!(g.ell0, base.ell0);
    }

    #[test]
    fn parity_cover_against_filtered_enumeration() {
        let sch = pants_scheme(2.0, 2.5, 8.0).unwrap();
        let cover = AbelianCover::cyclic(2, &[1, 1]).unwrap();
        let g = l0_cover(&sch, &cover.action, 5).unwrap();
        // oracle: even exponent sum, any class (powers included)
        let mut best = f64::INFINITY;
        for n in 1..=5 {
            for_each_class(2, n, false, |w| {
                let sum: i64 = w.iter().map(|&a| if a < 2 { 1 } else { -1 }).sum();
                if sum % 2 == 0 {
                    best = best.min(sch.word_matrix(w).displacement_length().unwrap());
                }
            });
        }
        assert_eq!(g.ell0, best);
        assert!(g.ell0 >= shortest_geodesic(&sch, 5).unwrap().ell0);
    }

    #[test]
    fn zero_volumes() {
        assert_eq!(zero_volume(&cylinder_scheme(2.0).unwrap(), 3), 0.0);
        let p = pants_scheme(2.0, 2.0, 8.0).unwrap();
        assert!((zero_volume(&p, 1) - 2.0 * PI).abs() < 1e-15);
        assert!((zero_volume(&p, 5) - 10.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn girth_of_small_groups() {
        for n in 1..=7 {
            let zn = AbelianCover::cyclic(n, &[1]).unwrap();
            assert_eq!(girth(&zn.action).unwrap(), n);
        }
        assert_eq!(simple_girth(&AbelianCover::cyclic(6, &[1]).unwrap().action).unwrap(), Some(6));
        assert_eq!(simple_girth(&AbelianCover::cyclic(2, &[1]).unwrap().action).unwrap(), None);
        let v4 = AbelianCover::parse("Z2xZ2:1,0;0,1").unwrap();
        assert_eq!(simple_girth(&v4.action).unwrap(), Some(4));
        // γ₁² lies in the kernel
        assert_eq!(girth(&v4.action).unwrap(), 2);
        let z5sq = AbelianCover::parse("Z5xZ5:1,0;0,1").unwrap();
        assert_eq!(girth(&z5sq.action).unwrap(), 4);
        assert_eq!(simple_girth(&z5sq.action).unwrap(), Some(4));
        let s3 = regular_action(&[vec![1, 0, 2], vec![0, 2, 1]], Some(6)).unwrap();
        assert_eq!(girth(&s3.action).unwrap(), 2);
        assert_eq!(simple_girth(&s3.action).unwrap(), Some(6));
        for a in [&v4.action, &z5sq.action, &s3.action] {
            assert_eq!(min_subgroup_word_length(a, 10).unwrap(), Some(girth(a).unwrap()));
        }
    }

    #[test]
    fn non_regular_is_rejected() {
        // index-3 subgroup with a nontrivial core quotient S3
        let a = CosetAction::new(vec![vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        assert!(matches!(girth(&a), Err(Error::NonRegular)));
        assert!(min_subgroup_word_length(&a, 4).unwrap().unwrap() <= 2);
    }

    #[test]
    fn congruence_girth_grows() {
        let [g1, g2] = search_integral_fixture(16, 1.5, &[2, 3, 5]).unwrap();
        let gens = [g1, g2];
        let mut last = 0;
        for q in [2u64, 3, 5, 7] {
            let c = congruence_action(&gens, q, CongruenceKind::Gamma).unwrap();
            let g = girth(&c.action).unwrap();
            assert!(g >= last, "q={q} girth {g}");
            last = g;
            if c.degree() <= 24 {
                assert_eq!(min_subgroup_word_length(&c.action, 10).unwrap(), Some(g));
            }
        }
        let sch = integral_scheme(&gens).unwrap();
        for q in [1u64, 2, 3, 5] {
            let r = l0_congruence_check(&sch, &gens, q, 4).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn invariants_are_consistent() {
        let sch = pants_scheme(2.0, 2.0, 8.0).unwrap();
        let g = AbelianCover::parse("Z4xZ4:1,0;0,1").unwrap();
        let inv = cover_invariants(&sch, &g.action, 6).unwrap();
        assert_eq!(inv.degree, 16);
        assert_eq!(inv.girth, Some(4));
        assert_eq!(inv.min_subgroup_word_length, Some(4));
        assert!(inv.ell0 >= inv.base_ell0);
        assert!(inv.ell0 >= inv.girth_length_bound.unwrap());
        assert!((inv.zvol - 16.0 * inv.base_zvol).abs() < 1e-12);
    }

    #[test]
    fn characters_factor_the_regular_determinant() {
        let sch = cylinder_scheme(2.0).unwrap();
        let z2 = AbelianCover::cyclic(2, &[1]).unwrap();
        let samples = [Complex64::new(0.5, 1.0), Complex64::new(-0.7, 3.3), Complex64::new(1.2, -6.0)];
        let rep = factorization_check(&sch, &z2, &samples, 40, 0).unwrap();
        assert!(rep.max_relative_error < 1e-10, "{rep:?}");
        let regular = TransferZeta::new(sch.clone(), induced_permutation_rep(&z2.action), 40, 0).unwrap();
        for s in samples {
            let err = relative_from_logs(cylinder_zeta_log(4.0, s), regular.eval(s).unwrap().log);
            assert!(err < 1e-10, "{s} {err}");
        }
        let trivial = factorization_check(&sch, &AbelianCover::cyclic(1, &[0]).unwrap(), &samples, 24, 0).unwrap();
        assert!(trivial.max_relative_error < 1e-15);
    }
}
