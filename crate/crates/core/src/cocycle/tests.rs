use super::*;
use crate::hyp4::{regular_simplex, simplex_volume, Simplex4};
use crate::lines::{line_through, project_to_line};
use crate::pvspace::{make_totally_real_triple, random_complex_point, random_point};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn five(v: Vec<ProjPoint>) -> [ProjPoint; 5] {
    v.try_into().unwrap()
}

fn six(v: Vec<ProjPoint>) -> [ProjPoint; 6] {
    v.try_into().unwrap()
}

fn no_shortcut() -> EvalOptions {
    EvalOptions {
        totally_real_shortcut: false,
        ..EvalOptions::default()
    }
}

#[test]
fn real_coordinates_give_zero() {
    let mut r = rng(1);
    let t = five((0..5).map(|_| random_real_point(2, 0.9, &mut r)).collect());
    assert_eq!(evaluate(&t, &EvalOptions::default()).unwrap().value, 0.0);
    let c = evaluate(&t, &no_shortcut()).unwrap();
    assert!(c.abs_value <= 1e-8 * v4_const(), "{c:?}");
}

#[test]
fn isometric_totally_real_tuple_vanishes() {
    let mut r = rng(2);
    for _ in 0..5 {
        let t = five(random_totally_real_tuple(3, 5, 0.95, &mut r));
        let c = evaluate(&t, &no_shortcut()).unwrap();
        assert!(c.abs_value <= 1e-8 * v4_const(), "{c:?}");
    }
}

#[test]
fn repeated_vertex_gives_zero() {
    let mut r = rng(3);
    let mut t = five((0..5).map(|_| random_point(2, 0.9, &mut r)).collect());
    t[4] = t[2].clone();
    assert_eq!(evaluate(&t, &no_shortcut()).unwrap().value, 0.0);
    t[1] = t[0].clone();
    assert_eq!(evaluate(&t, &no_shortcut()).unwrap().value, 0.0);
}

#[test]
fn regular_configuration_matches_direct_volume() {
    let k = 0.99f64;
    let rho = (1.0 - (1.0 - k * k).sqrt()) / k;
    let t = regular_tuple(1, rho);
    let c = evaluate(&t, &EvalOptions::default()).unwrap();
    let direct = simplex_volume(&Simplex4::new(regular_simplex(k)), &QuadConfig::default()).unwrap();
    assert!((c.abs_value - direct.value.abs()).abs() <= 1e-6 * direct.value.abs(), "{c:?} {direct:?}");
}

#[test]
fn reduction_is_exact_on_lines() {
    let mut r = rng(4);
    for _ in 0..3 {
        let t = five(random_line_tuple(2, 5, 0.95, &mut r).unwrap());
        let a = evaluate(&t, &no_shortcut()).unwrap();
        let b = evaluate(&t, &EvalOptions { reduce: false, ..no_shortcut() }).unwrap();
        assert!((a.abs_value - b.abs_value).abs() <= 1e-10 * a.abs_value, "{a:?} {b:?}");
        assert!(a.gram_residual < 1e-8);
    }
}

#[test]
fn alternation_within_one_embedding() {
    let mut r = rng(5);
    let t = random_line_tuple(2, 5, 0.9, &mut r).unwrap();
    let e = gram_embed::<4>(&t).unwrap();
    let k: [KleinPoint<4>; 5] = e.klein.clone().try_into().unwrap();
    let base = simplex_volume(&Simplex4::new(k), &QuadConfig::default()).unwrap().value;
    // A 3-cycle is even, a transposition odd.
    let even = [k[1], k[2], k[0], k[3], k[4]];
    let odd = [k[0], k[1], k[2], k[4], k[3]];
    assert_eq!(simplex_volume(&Simplex4::new(even), &QuadConfig::default()).unwrap().value, base);
    assert_eq!(simplex_volume(&Simplex4::new(odd), &QuadConfig::default()).unwrap().value, -base);
}

#[test]
fn totally_real_first_triple_vanishes() {
    let mut r = rng(6);
    for _ in 0..5 {
        let (a, b, c) = make_totally_real_triple(2, &mut r);
        let t = [a, b, c, random_point(2, 0.9, &mut r), random_point(2, 0.9, &mut r)];
        let v = evaluate(&t, &no_shortcut()).unwrap();
        assert!(v.abs_value <= 1e-8 * v4_const(), "{v:?}");
    }
}

#[test]
fn cross_line_on_one_line() {
    let mut r = rng(7);
    let t = five(random_line_tuple(2, 5, 0.9, &mut r).unwrap());
    let d = cross_line_check(&t, &no_shortcut(), true).unwrap();
    assert!(d <= 1e-10, "{d}");
}

#[test]
fn cross_line_agreement_is_second_order_near_a_line() {
    let mut r = rng(8);
    let base = random_line_tuple(2, 5, 0.9, &mut r).unwrap();
    let bump = |i: usize, eps: f64| {
        let mut c = base[i].disc_coords().unwrap().to_vec();
        c[1] = c[1] + Quaternion::new(0.3 * eps * (i + 1) as f64, 0.2 * eps, -0.1 * eps * i as f64, 0.05 * eps);
        ProjPoint::from_disc(&c).unwrap()
    };
    let d: Vec<f64> = [1e-2, 1e-3]
        .iter()
        .map(|&eps| cross_line_check(&std::array::from_fn(|i| bump(i, eps)), &no_shortcut(), false).unwrap())
        .collect();
    assert!(d[1] > 0.0 && d[1] < 1e-5, "{d:?}");
    let order = (d[0] / d[1]).log10();
    assert!((order - 2.0).abs() < 0.2, "{d:?}");
}

#[test]
fn cross_line_totally_real_is_zero() {
    let mut r = rng(9);
    let t = five(random_totally_real_tuple(2, 5, 0.9, &mut r));
    for pair in [(0, 1), (2, 3)] {
        let c = evaluate(&t, &EvalOptions { pair, ..no_shortcut() }).unwrap();
        assert!(c.abs_value <= 1e-8 * v4_const());
    }
}

#[test]
fn coboundary_with_repeat_collapses() {
    let mut r = rng(10);
    let mut t = random_line_tuple(2, 6, 0.9, &mut r).unwrap();
    t[5] = t[3].clone();
    let v = coboundary_check(&six(t), &QuadConfig::default()).unwrap();
    assert!(v <= 1e-10, "{v}");
}

#[test]
fn coboundary_random_on_line() {
    let mut r = rng(11);
    for _ in 0..3 {
        let t = six(random_line_tuple(2, 6, 0.9, &mut r).unwrap());
        let v = coboundary_check(&t, &QuadConfig::default()).unwrap();
        assert!(v <= 1e-6, "{v}");
    }
}

#[test]
fn projection_proof_vanishing_pattern() {
    let mut r = rng(12);
    let z: Vec<ProjPoint> = (0..5).map(|_| random_point(2, 0.9, &mut r)).collect();
    let line = line_through(&z[0], &z[1], ScalarField::Quaternionic).unwrap();
    let mut six_pts = z.clone();
    six_pts.push(project_to_line(&z[4], &line).unwrap());
    let projected: Vec<ProjPoint> = six_pts
        .iter()
        .enumerate()
        .map(|(i, p)| if i < 2 { p.clone() } else { project_to_line(p, &line).unwrap() })
        .collect();
    let f = face_volumes(&six(projected), &QuadConfig::default()).unwrap();
    // Faces omitting one of z0..z3 contain both z4 and its projection.
    for v in &f[..4] {
        assert!(v.abs() <= 1e-8, "{f:?}");
    }
    assert!((f[4].abs() - f[5].abs()).abs() <= 1e-8);
}

#[test]
fn complex_real_triple_is_zero() {
    let mut r = rng(13);
    let t = [random_real_point(2, 0.9, &mut r), random_real_point(2, 0.9, &mut r), random_real_point(2, 0.9, &mut r)];
    assert!(evaluate_complex(&t, &QuadConfig::default()).unwrap().abs() <= 1e-12);
}

#[test]
fn complex_bounded_and_alternating() {
    let mut r = rng(14);
    for _ in 0..20 {
        let t: [ProjPoint; 3] = std::array::from_fn(|_| random_complex_point(2, 0.99, &mut r));
        let q = QuadConfig::default();
        let a = evaluate_complex(&t, &q).unwrap();
        assert!(a.abs() < PI);
        let swapped = [t[1].clone(), t[0].clone(), t[2].clone()];
        let b = evaluate_complex(&swapped, &q).unwrap();
        assert!((a.abs() - b.abs()).abs() <= 1e-6 * a.abs().max(1e-12));
    }
}

#[test]
fn complex_projection_identity() {
    let mut r = rng(15);
    let t: [ProjPoint; 3] = std::array::from_fn(|_| random_complex_point(2, 0.95, &mut r));
    let line = line_through(&t[0], &t[1], ScalarField::Complex).unwrap();
    let pz = project_to_line(&t[2], &line).unwrap();
    let q = QuadConfig::default();
    let a = evaluate_complex(&t, &q).unwrap();
    let b = evaluate_complex(&[t[0].clone(), t[1].clone(), pz], &q).unwrap();
    assert!((a - b).abs() <= 1e-6 * a.abs().max(1e-12), "{a} {b}");
}

#[test]
fn complex_near_ideal_triangle() {
    let rho = 1.0 - 1e-6;
    let t: [ProjPoint; 3] = std::array::from_fn(|k| {
        let th = 2.0 * PI * k as f64 / 3.0;
        ProjPoint::from_disc(&[Quaternion::complex(rho * th.cos(), rho * th.sin()), Quaternion::ZERO]).unwrap()
    });
    let a = evaluate_complex(&t, &QuadConfig::default()).unwrap();
    assert!(PI - a.abs() < 1e-4 && a.abs() < PI, "{a}");
}

#[test]
fn search_without_refinement_is_reproducible() {
    let cfg = SearchConfig {
        n: 2,
        seed: 3,
        restarts: 6,
        iters: 0,
        ..SearchConfig::default()
    };
    let a = sup_search(&cfg).unwrap();
    let b = sup_search(&cfg).unwrap();
    assert_eq!(a, b);
    assert!(a.trajectory.is_empty());
    assert!(a.best_value <= v4_const() + BOUND_TOL);
    assert!(!a.violation);
}

#[test]
fn empty_search() {
    let cfg = SearchConfig {
        restarts: 0,
        iters: 0,
        ..SearchConfig::default()
    };
    let a = sup_search(&cfg).unwrap();
    assert_eq!(a.best_value, 0.0);
    assert!(a.trajectory.is_empty());
    assert_eq!(a.evaluations, 0);
}

#[test]
fn search_from_regular_start() {
    let cfg = SearchConfig {
        n: 1,
        seed: 1,
        restarts: 2,
        iters: 5,
        refine_top: 1,
        seed_regular: true,
        ..SearchConfig::default()
    };
    let a = sup_search(&cfg).unwrap();
    assert!(a.best_value >= v4_const() - 1e-3, "{}", a.best_value);
    assert!(a.best_value <= v4_const() + BOUND_TOL);
    assert!(!a.violation);
    assert!(a.trajectory.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn encode_decode_round_trip() {
    let cfg = SearchConfig { n: 2, ..SearchConfig::default() };
    let obj = Objective { cfg: &cfg, opts: EvalOptions::default() };
    let mut r = rng(16);
    let t = five((0..5).map(|_| random_point(2, 0.9, &mut r)).collect());
    let x = obj.encode(&t, 1e-3);
    let back = obj.decode(&x, 1e-3).unwrap();
    for (a, b) in t.iter().zip(&back) {
        assert!(a.approx_eq(b, 1e-12));
    }
}

#[test]
fn projection_is_the_nearest_point() {
    use crate::lines::cosh_dist;
    let mut r = rng(17);
    for _ in 0..5 {
        let line_pts = random_line_tuple(2, 2, 0.9, &mut r).unwrap();
        let line = line_through(&line_pts[0], &line_pts[1], ScalarField::Quaternionic).unwrap();
        let z = random_point(2, 0.9, &mut r);
        let pz = project_to_line(&z, &line).unwrap();
        let u0 = line.ball_coords(&pz).unwrap().to_array();
        // Start away from the answer and minimize the distance over the chart.
        let x0: Vec<f64> = u0.iter().map(|c| 0.5 * c).collect();
        let (x, _, _) = nelder_mead(&x0, 0.1, 3000, |x| {
            let u = Quaternion::new(x[0], x[1], x[2], x[3]);
            match line.point_at(u) {
                Ok(p) => -cosh_dist(&z, &p).unwrap(),
                Err(_) => f64::NEG_INFINITY,
            }
        });
        for (a, b) in x.iter().zip(&u0) {
            assert!((a - b).abs() < 1e-6, "{x:?} vs {u0:?}");
        }
    }
}

#[test]
fn gram_embedding_matches_ball_chart() {
    let mut r = rng(18);
    let q = QuadConfig::default();
    for _ in 0..5 {
        let t = five((0..5).map(|_| random_point(2, 0.95, &mut r)).collect());
        for pair in [(0, 1), (2, 3)] {
            let red = crate::lines::reduce_onto(&t, pair.0, pair.1).unwrap();
            let klein: [KleinPoint<4>; 5] = std::array::from_fn(|i| {
                let u = red.line.ball_coords(&red.points[i]).unwrap();
                let s = 2.0 / (1.0 + u.norm_sqr());
                KleinPoint(u.to_array().map(|c| s * c))
            });
            let chart = simplex_volume(&Simplex4::new(klein), &q).unwrap().value.abs();
            let c = evaluate(&t, &EvalOptions { pair, ..no_shortcut() }).unwrap();
            assert!((chart - c.abs_value).abs() <= 1e-6 * chart, "{chart} vs {c:?}");
        }
    }
}
