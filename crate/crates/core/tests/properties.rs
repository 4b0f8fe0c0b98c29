use num_complex::Complex64;
use proptest::prelude::*;

use schottky_zeta::covers::{girth, l0_cover, min_subgroup_word_length, zero_volume};
use schottky_zeta::harness::fmt_f64;
use schottky_zeta::representations::{congruence_action, AbelianCover, CongruenceKind, CosetAction, IntMatrix, UnitaryRep};
use schottky_zeta::resonance::{winding_count_strict, EulerZeta, Rect, ZetaFunction, ZetaValue};
use schottky_zeta::transfer::cylinder_zeta_log;
use schottky_zeta::words::shortest_geodesic;
use schottky_zeta::{cylinder_scheme, hyperbolic_with_axis, pants_scheme, Moebius, SchottkyScheme, Word};

/// `∏ (s − r)`, with its logarithmic derivative.
struct Poly(Vec<Complex64>);

impl ZetaFunction for Poly {
    fn eval(&self, s: Complex64) -> schottky_zeta::Result<ZetaValue> {
        let log: Complex64 = self.0.iter().map(|r| (s - r).ln()).sum();
        let dlog: Complex64 = self.0.iter().map(|r| 1.0 / (s - r)).sum();
        Ok(ZetaValue {
            log,
            dlog: Some(dlog),
            proximity: log.re,
            precision_warning: false,
        })
    }

    fn degree(&self) -> usize {
        1
    }

    fn describe(&self) -> String {
        "poly".into()
    }
}

fn letters(m: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0..2 * m, 0..max)
}

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn displacement_is_conjugation_invariant_and_additive(
        c in -3.0f64..3.0, w in 0.2f64..2.0, ell in 0.1f64..4.0,
        a in 0.5f64..2.0, b in -1.0f64..1.0, n in 1u32..5,
    ) {
        let g = hyperbolic_with_axis(c, w, ell).unwrap();
        let h = Moebius::new(a, b, 0.3, (1.0 + 0.3 * b) / a).unwrap();
        let conj = g.conjugate_by(&h).displacement_length().unwrap();
        prop_assert!((conj - ell).abs() < 1e-9 * ell.max(1.0));
        let mut p = Moebius::identity();
        for _ in 0..n {
            p = p.compose(&g);
        }
        prop_assert!((p.displacement_length().unwrap() - n as f64 * ell).abs() < 1e-8 * n as f64 * ell.max(1.0));
        prop_assert!(g.compose(&g.inverse()).approx_eq(&Moebius::identity(), 1e-10));
    }

    #[test]
    fn word_reduction(m in 1usize..4, raw in letters(3, 16), raw2 in letters(3, 16)) {
        let clip = |v: &[usize]| v.iter().map(|x| x % (2 * m)).collect::<Vec<_>>();
        let w = Word::new(clip(&raw), m).unwrap();
        let v = Word::new(clip(&raw2), m).unwrap();
        prop_assert_eq!(w.reduce().reduce(), w.reduce());
        prop_assert!(w.concat(&w.inverse()).reduce().is_empty());
        prop_assert_eq!(w.concat(&v).inverse().reduce(), v.inverse().concat(&w.inverse()).reduce());
        let cr = w.class_representative();
        if !cr.is_empty() {
            let mut rotated = cr.letters.clone();
            rotated.rotate_left(1);
            prop_assert_eq!(Word::new(rotated, m).unwrap().class_representative(), cr.clone());
            prop_assert_eq!(v.concat(&w).concat(&v.inverse()).class_representative(), cr);
        }
    }

    #[test]
    fn action_is_a_homomorphism(p0 in perm(6), p1 in perm(6), w1 in letters(2, 10), w2 in letters(2, 10)) {
        let Ok(a) = CosetAction::new(vec![p0, p1]) else { return Ok(()) };
        let mut both = w1.clone();
        both.extend_from_slice(&w2);
        let f = a.word_perm(&w1);
        let g = a.word_perm(&w2);
        prop_assert_eq!(a.word_perm(&both), g.iter().map(|&x| f[x]).collect::<Vec<_>>());
        let w = Word::new(w1.clone(), 2).unwrap();
        let ww = w.concat(&w.inverse());
        prop_assert_eq!(a.character(&ww.letters), a.degree());
        prop_assert_eq!(CosetAction::from_json(&a.to_json().unwrap()).unwrap(), a);
    }

    #[test]
    fn characters_detect_the_kernel(n1 in 1usize..5, n2 in 1usize..5, x in 0i64..5, y in 0i64..5, z in 0i64..5, t in 0i64..5, w in letters(2, 8)) {
        let g = AbelianCover::new(vec![n1, n2], vec![vec![x, y], vec![z, t]]);
        let Ok(g) = g else { return Ok(()) };
        let chars = UnitaryRep::abelian_characters(&g).unwrap();
        let sum: Complex64 = chars.iter().map(|c| c.trace(&w)).sum();
        // Σ_χ χ(w) is the character of the regular representation
        let expected = g.action.character(&w) as f64;
        prop_assert!((sum - Complex64::new(expected, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn girth_equals_min_word_length(n1 in 2usize..6, n2 in 1usize..5, x in 0i64..6, y in 0i64..6, z in 0i64..6, t in 0i64..6) {
        prop_assume!(n1 * n2 <= 24);
        let Ok(g) = AbelianCover::new(vec![n1, n2], vec![vec![x, y], vec![z, t]]) else { return Ok(()) };
        let gi = girth(&g.action).unwrap();
        prop_assert_eq!(min_subgroup_word_length(&g.action, 10).unwrap(), Some(gi));
    }

    #[test]
    fn scheme_json_round_trip(l1 in 0.5f64..4.0, l2 in 0.5f64..4.0, sep in 6.0f64..12.0) {
        let Ok(s) = pants_scheme(l1, l2, sep) else { return Ok(()) };
        let back = SchottkyScheme::<f64>::from_json(&s.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.fingerprint(), s.fingerprint());
        prop_assert_eq!(back, s);
    }

    #[test]
    fn floats_print_losslessly(x in proptest::num::f64::ANY) {
        let text = fmt_f64(x);
        let back: f64 = text.parse().unwrap();
        prop_assert!(back == x || (x.is_nan() && back.is_nan()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn winding_is_additive(
        roots in proptest::collection::vec((-0.9f64..0.9, -0.9f64..0.9), 0..6),
        t in 0.3f64..0.7,
    ) {
        let roots: Vec<Complex64> = roots.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        let rect = Rect::new(-1.0, 1.0, -1.0, 1.0).unwrap();
        let (left, right) = rect.split(t);
        let cut = -1.0 + 2.0 * t;
        prop_assume!(roots.iter().all(|r| (r.re - cut).abs() > 0.02 && (r.im - cut).abs() > 0.02));
        let z = Poly(roots.clone());
        let whole = winding_count_strict(&z, &rect).unwrap().count;
        let parts = winding_count_strict(&z, &left).unwrap().count + winding_count_strict(&z, &right).unwrap().count;
        prop_assert_eq!(whole, roots.len());
        prop_assert_eq!(parts, whole);
    }

    #[test]
    fn euler_product_symmetries(re in -3.0f64..2.0, im in -15.0f64..15.0, k in 1usize..4) {
        let sch = cylinder_scheme(2.0).unwrap();
        let rep = if k == 1 {
            UnitaryRep::trivial(1, 1)
        } else {
            schottky_zeta::representations::induced_permutation_rep(&AbelianCover::cyclic(k, &[1]).unwrap().action)
        };
        let z = EulerZeta::new(&sch, &rep, 1).unwrap();
        let s = Complex64::new(re, im);
        let a = z.eval(s).unwrap().log;
        let b = z.eval(s.conj()).unwrap().log;
        let c = Complex64::new(1.0, 0.0);
        prop_assert!((c - (b - a.conj()).exp()).norm() < 1e-9);
        // a degree-k cyclic cover of a cylinder is the cylinder of length kℓ
        let closed = cylinder_zeta_log(2.0 * k as f64, s);
        prop_assert!((c - (closed - a).exp()).norm() < 1e-9);
    }

    #[test]
    fn cover_invariants_scale(k in 1usize..6, r in 0i64..6) {
        let sch = pants_scheme(2.0, 3.0, 8.0).unwrap();
        let Ok(g) = AbelianCover::cyclic(k, &[1, r]) else { return Ok(()) };
        let base = shortest_geodesic(&sch, 6).unwrap();
        let cover = l0_cover(&sch, &g.action, 6).unwrap();
        prop_assert!(cover.ell0 >= base.ell0 - 1e-12);
        prop_assert!((zero_volume(&sch, k) - k as f64 * zero_volume(&sch, 1)).abs() < 1e-12);
    }

    #[test]
    fn congruence_degree_by_orbit_stabilizer(q in 2u64..8, kind in 0u8..3) {
        let gens = [IntMatrix::new(3, 4, 2, 3).unwrap(), IntMatrix::new(7, 31, 2, 9).unwrap()];
        let c = congruence_action(&gens, q, CongruenceKind::from_index(kind).unwrap()).unwrap();
        prop_assert_eq!(c.degree() * c.stabilizer_order, c.image_order);
    }
}
