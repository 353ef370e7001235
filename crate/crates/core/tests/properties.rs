//! Property tests for the geometric invariants across modules.

use proptest::prelude::*;
use qkahler::cocycle::{evaluate, evaluate_complex, random_line_tuple, EvalOptions, BOUND_TOL};
use qkahler::hyp4::{gram_embed, simplex_volume, v4_const, KleinPoint, QuadConfig, Simplex4};
use qkahler::lines::{dist, line_through, project_to_line, ScalarField};
use qkahler::pvspace::{random_complex_point, random_point, triple_imag_ratio, Isometry, ProjPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn klein_simplex(r: &mut ChaCha8Rng, r_max: f64) -> [KleinPoint<4>; 5] {
    std::array::from_fn(|_| loop {
        let x: [f64; 4] = std::array::from_fn(|_| r.gen_range(-r_max..r_max));
        if x.iter().map(|c| c * c).sum::<f64>() < r_max * r_max {
            break KleinPoint(x);
        }
    })
}

fn quick_quad() -> QuadConfig {
    QuadConfig {
        tol: 1e-7,
        ..QuadConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_isometry_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let (p, q) = (random_point(n, 0.99, &mut r), random_point(n, 0.99, &mut r));
        let g = Isometry::random(n, 1.5, &mut r);
        let d = dist(&p, &q).unwrap();
        let dg = dist(&g.apply_point(&p).unwrap(), &g.apply_point(&q).unwrap()).unwrap();
        prop_assert!((d - dg).abs() <= 1e-8 * d.max(1.0), "{d} vs {dg}");
    }

    #[test]
    fn distance_satisfies_triangle_inequality(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let p: [ProjPoint; 3] = std::array::from_fn(|_| random_point(n, 0.99, &mut r));
        let d = |a: usize, b: usize| dist(&p[a], &p[b]).unwrap();
        prop_assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
    }

    #[test]
    fn projection_is_idempotent_and_real(seed in any::<u64>(), n in 2usize..=3) {
        let mut r = rng(seed);
        let (a, b, w) = (random_point(n, 0.95, &mut r), random_point(n, 0.95, &mut r), random_point(n, 0.99, &mut r));
        prop_assume!(!a.approx_eq(&b, 1e-6));
        let line = line_through(&a, &b, ScalarField::Quaternionic).unwrap();
        let pw = project_to_line(&w, &line).unwrap();
        prop_assert!(line.residual(&pw).unwrap() <= 1e-10);
        prop_assert!(project_to_line(&pw, &line).unwrap().approx_eq(&pw, 1e-9));
        prop_assert!(triple_imag_ratio(a.lift(), w.lift(), pw.lift()).unwrap() <= 1e-8);
        // The foot of the perpendicular is no farther than the spanning points.
        let d = dist(&w, &pw).unwrap();
        prop_assert!(d <= dist(&w, &a).unwrap() + 1e-9 && d <= dist(&w, &b).unwrap() + 1e-9);
    }

    #[test]
    fn line_points_embed_isometrically(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let pts = random_line_tuple(n, 6, 0.9, &mut r).unwrap();
        let e = gram_embed::<4>(&pts).unwrap();
        prop_assert_eq!((e.positive, e.negative), (4, 1));
        prop_assert!(e.distance_residual <= 1e-8);
        prop_assert!(e.klein.iter().all(|k| k.is_interior()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transposition_negates_volume_exactly(seed in any::<u64>(), i in 0usize..5, j in 0usize..5) {
        prop_assume!(i != j);
        let mut r = rng(seed);
        let v = klein_simplex(&mut r, 0.9);
        let mut w = v;
        w.swap(i, j);
        let a = simplex_volume(&Simplex4::new(v), &quick_quad()).unwrap();
        let b = simplex_volume(&Simplex4::new(w), &quick_quad()).unwrap();
        prop_assert_eq!(a.value, -b.value);
    }

    #[test]
    fn simplex_volume_is_below_v4(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = simplex_volume(&Simplex4::new(klein_simplex(&mut r, 0.99)), &quick_quad()).unwrap();
        prop_assert!(v.value.abs() - v.err_est <= v4_const());
    }

    #[test]
    fn cocycle_is_bounded_and_isometry_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let t: [ProjPoint; 5] = std::array::from_fn(|_| random_point(n, 0.95, &mut r));
        let g = Isometry::random(n, 1.0, &mut r);
        let gt: [ProjPoint; 5] = std::array::from_fn(|k| g.apply_point(&t[k]).unwrap());
        let opts = EvalOptions { quad: quick_quad(), ..EvalOptions::default() };
        let a = evaluate(&t, &opts).unwrap();
        let b = evaluate(&gt, &opts).unwrap();
        prop_assert!(a.abs_value <= v4_const() + BOUND_TOL && !a.bound_violation);
        prop_assert!((a.value - b.value).abs() <= 1e-6 * v4_const(), "{} vs {}", a.value, b.value);
    }

    #[test]
    fn cocycle_on_a_line_is_alternating(seed in any::<u64>(), i in 0usize..5, j in 0usize..5) {
        prop_assume!(i != j);
        let mut r = rng(seed);
        let t: [ProjPoint; 5] = random_line_tuple(2, 5, 0.9, &mut r).unwrap().try_into().unwrap();
        let mut s = t.clone();
        s.swap(i, j);
        let opts = EvalOptions { quad: quick_quad(), totally_real_shortcut: false, reduce: false, ..EvalOptions::default() };
        let a = evaluate(&t, &opts).unwrap().value;
        let b = evaluate(&s, &opts).unwrap().value;
        prop_assert!((a + b).abs() <= 1e-6 * v4_const(), "{a} vs {b}");
    }

    #[test]
    fn complex_areas_are_below_pi(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t: [ProjPoint; 3] = std::array::from_fn(|_| random_complex_point(2, 0.999, &mut r));
        let a = evaluate_complex(&t, &QuadConfig::default()).unwrap();
        prop_assert!(a.abs() < std::f64::consts::PI);
    }
}
