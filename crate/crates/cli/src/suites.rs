//! Property suites behind `verify`.

use std::f64::consts::PI;

use qkahler::cocycle::{coboundary_check, cross_line_check, evaluate, evaluate_complex, random_line_tuple,
    random_totally_real_tuple, EvalOptions};
use qkahler::hyp4::{cosh_matrix, embed_cosh_matrix, triangle_area_h2, v4_const, KleinPoint, KleinPoint2, QuadConfig};
use qkahler::lines::{dist, line_through, project_to_line, ScalarField};
use qkahler::oracle::angle_defect_area;
use qkahler::pvspace::{is_totally_real_triple, make_totally_real_triple, random_complex_point, random_point,
    triple_imag_ratio, ProjPoint};
use qkahler::{Error, Quaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::report::Check;

/// Disc radius of the near-ideal complex triangle.
pub const NEAR_IDEAL_RHO: f64 = 1.0 - 1e-6;

pub const SUITES: [&str; 6] = [
    "lemma-totreal",
    "lemma-realproj",
    "prop-projection",
    "gram-signature",
    "coboundary",
    "complex",
];

/// Runs `f` on `count` independent streams keyed by `(seed, salt, index)`
/// and returns the results in index order, whatever the thread count.
pub fn sample_map<T, F>(count: usize, seed: u64, salt: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt);
            rng.set_stream(i as u64);
            f(i, &mut rng)
        })
        .collect()
}

/// Largest finite value and number of errors.
fn max_ok(results: &[Result<f64, Error>]) -> (f64, usize, Option<String>) {
    let mut max = 0.0f64;
    let mut errors = 0;
    let mut first = None;
    for r in results {
        match r {
            Ok(v) => max = max.max(*v),
            Err(e) => {
                errors += 1;
                first.get_or_insert_with(|| e.to_string());
            }
        }
    }
    (max, errors, first)
}

fn error_note(errors: usize, first: &Option<String>) -> String {
    match first {
        Some(e) => format!(", {errors} errors (first: {e})"),
        None => String::new(),
    }
}

fn no_shortcut(quad: &QuadConfig) -> EvalOptions {
    EvalOptions {
        quad: quad.clone(),
        totally_real_shortcut: false,
        ..EvalOptions::default()
    }
}

pub fn verify(suite: &str, cfg: &RunConfig) -> anyhow::Result<Vec<Check>> {
    Ok(match suite {
        "lemma-totreal" => lemma_totreal(cfg),
        "lemma-realproj" => vec![lemma_realproj(cfg)],
        "prop-projection" => prop_projection(cfg),
        "gram-signature" => gram_signature(cfg),
        "coboundary" => vec![coboundary(cfg)],
        "complex" => complex(cfg),
        other => anyhow::bail!("unknown suite `{other}` (expected one of {})", SUITES.join(", ")),
    })
}

/// Constructed totally real triples test real; generic triples do not.
pub fn lemma_totreal(cfg: &RunConfig) -> Vec<Check> {
    let (n, m, tol) = (cfg.n, cfg.samples, cfg.tolerances.totreal);
    let constructed = sample_map(m, cfg.seed, 0x7072_0001, |_, r| {
        let (a, b, c) = make_totally_real_triple(n, r);
        let ratio = triple_imag_ratio(a.lift(), b.lift(), c.lift()).unwrap_or(f64::INFINITY);
        (ratio, is_totally_real_triple(&a, &b, &c, tol))
    });
    let real = constructed.iter().filter(|x| x.1).count();
    let max_ratio = constructed.iter().fold(0.0f64, |a, x| a.max(x.0));
    let first = Check::new(
        "constructed_real",
        real == m,
        format!("{real}/{m} constructed triples real, max imaginary ratio {max_ratio:.3e}"),
    )
    .stat("samples", m)
    .stat("real", real)
    .stat("max_imag_ratio", max_ratio);

    let generic = sample_map(m, cfg.seed, 0x7072_0002, |_, r| {
        let p: [ProjPoint; 3] = std::array::from_fn(|_| random_point(n, 0.99, r));
        !is_totally_real_triple(&p[0], &p[1], &p[2], tol)
    });
    let nonreal = generic.iter().filter(|&&x| x).count();
    let fraction = if m == 0 { 1.0 } else { nonreal as f64 / m as f64 };
    let second = Check::new(
        "generic_nonreal",
        fraction >= cfg.tolerances.nonreal_fraction,
        format!("{nonreal}/{m} generic triples non-real at tol {tol:e}"),
    )
    .stat("samples", m)
    .stat("nonreal", nonreal)
    .stat("fraction", fraction);
    vec![first, second]
}

/// `(z, w, Pi_L w)` is totally real for every line `L` through `z`.
pub fn lemma_realproj(cfg: &RunConfig) -> Check {
    let (n, m) = (cfg.n, cfg.samples);
    let results = sample_map(m, cfg.seed, 0x7072_0003, |_, r| {
        let z = random_point(n, 0.99, r);
        let w = random_point(n, 0.99, r);
        let line = loop {
            let q = random_point(n, 0.95, r);
            if let Ok(l) = line_through(&z, &q, ScalarField::Quaternionic) {
                break l;
            }
        };
        let pw = project_to_line(&w, &line)?;
        triple_imag_ratio(z.lift(), w.lift(), pw.lift())
    });
    let (max, errors, first) = max_ok(&results);
    let tol = cfg.tolerances.realproj;
    Check::new(
        "projected_real",
        errors == 0 && max <= tol,
        format!("n={n}: max relative imaginary part {max:.3e} over {m} samples{}", error_note(errors, &first)),
    )
    .stat("n", n)
    .stat("samples", m)
    .stat("max_imag_ratio", max)
    .stat("errors", errors)
}

/// Reduction onto different lines gives the same `|c|`; totally real
/// tuples give zero without the shortcut.
pub fn prop_projection(cfg: &RunConfig) -> Vec<Check> {
    let (n, m) = (cfg.n, cfg.samples);
    let opts = no_shortcut(&cfg.quad);
    let results = sample_map(m, cfg.seed, 0x7072_0004, |_, r| {
        let t: [ProjPoint; 5] = std::array::from_fn(|_| random_point(n, 0.9, r));
        cross_line_check(&t, &opts, false)
    });
    let (max, errors, first) = max_ok(&results);
    let tol = cfg.tolerances.cross_line;
    let over = results.iter().filter(|r| matches!(r, Ok(d) if *d > tol)).count();
    let mut sorted: Vec<f64> = results.iter().filter_map(|r| r.as_ref().ok().copied()).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted.get(sorted.len() / 2).copied().unwrap_or(0.0);
    let cross = Check::new(
        "cross_line",
        errors == 0 && max <= tol,
        format!(
            "n={n}: |c| via lines 01 and 23, max relative gap {max:.3e} (median {median:.3e}), {over}/{m} above {tol:e}{}",
            error_note(errors, &first)
        ),
    )
    .stat("samples", m)
    .stat("max_rel_gap", max)
    .stat("median_rel_gap", median)
    .stat("above_tol", over)
    .stat("errors", errors);

    let v4 = v4_const();
    let results = sample_map(m, cfg.seed, 0x7072_0005, |_, r| {
        let t: [ProjPoint; 5] = random_totally_real_tuple(n, 5, 0.95, r).try_into().expect("five points");
        let mut worst = 0.0f64;
        for pair in [(0, 1), (2, 3)] {
            let c = evaluate(&t, &EvalOptions { pair, ..opts.clone() })?;
            worst = worst.max(c.abs_value / v4);
        }
        Ok(worst)
    });
    let (max, errors, first) = max_ok(&results);
    let tol = cfg.tolerances.vanish;
    let vanish = Check::new(
        "totally_real_vanish",
        errors == 0 && max <= tol,
        format!(
            "n={n}: max |c|/v4 {max:.3e} over {m} totally real tuples (shortcut off){}",
            error_note(errors, &first)
        ),
    )
    .stat("samples", m)
    .stat("max_rel_value", max)
    .stat("errors", errors);
    vec![cross, vanish]
}

#[derive(Serialize)]
struct SignatureRow {
    positive: usize,
    negative: usize,
    zero: usize,
    eigenvalues: Vec<f64>,
}

/// Seven points of one quaternionic line embed isometrically in `H^4_R`.
pub fn gram_signature(cfg: &RunConfig) -> Vec<Check> {
    let (n, m) = (cfg.n, cfg.samples);
    let tol = cfg.tolerances.signature;
    let rows = sample_map(m, cfg.seed, 0x7072_0006, |_, r| -> Result<(SignatureRow, f64, f64), Error> {
        let pts = random_line_tuple(n, 7, 0.9, r)?;
        let e = match embed_cosh_matrix::<4>(&cosh_matrix(&pts)?) {
            Ok(e) => e,
            Err(Error::Calibration { positive, negative, zero, .. }) => {
                let row = SignatureRow { positive, negative, zero, eigenvalues: vec![] };
                return Ok((row, f64::INFINITY, f64::INFINITY));
            }
            Err(e) => return Err(e),
        };
        let scale = e.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
        let positive = e.eigenvalues.iter().filter(|&&l| l > tol * scale).count();
        let negative = e.eigenvalues.iter().filter(|&&l| l < -tol * scale).count();
        let small = e
            .eigenvalues
            .iter()
            .filter(|l| l.abs() <= tol * scale)
            .fold(0.0f64, |a, l| a.max(l.abs() / scale));
        let mut round_trip = 0.0f64;
        for i in 0..7 {
            for j in (i + 1)..7 {
                let d_in = dist(&pts[i], &pts[j])?;
                let d_out = e.klein[i].cosh_dist(&e.klein[j]).max(1.0).acosh();
                round_trip = round_trip.max((d_in - d_out).abs() / d_in.max(1.0));
            }
        }
        let row = SignatureRow { positive, negative, zero: 7 - positive - negative, eigenvalues: e.eigenvalues };
        Ok((row, small, round_trip))
    });
    let mut errors = 0;
    let mut first = None;
    let mut good = 0;
    let mut max_small = 0.0f64;
    let mut max_trip = 0.0f64;
    let mut table = Vec::new();
    for r in rows {
        match r {
            Ok((row, small, trip)) => {
                if row.positive == 4 && row.negative == 1 && row.zero == 2 {
                    good += 1;
                }
                max_small = max_small.max(small);
                max_trip = max_trip.max(trip);
                table.push(row);
            }
            Err(e) => {
                errors += 1;
                first.get_or_insert_with(|| e.to_string());
            }
        }
    }
    let signature = Check::new(
        "signature",
        errors == 0 && good == m,
        format!(
            "n={n}: {good}/{m} samples with signature (4,1,2), largest zero eigenvalue {max_small:.3e} relative{}",
            error_note(errors, &first)
        ),
    )
    .stat("samples", m)
    .stat("good", good)
    .stat("max_zero_rel", max_small)
    .stat("eigenvalue_table", &table)
    .stat("errors", errors);
    let trip_tol = cfg.tolerances.distance;
    let round_trip = Check::new(
        "round_trip",
        errors == 0 && max_trip <= trip_tol,
        format!("max relative distance error through the Klein model {max_trip:.3e}"),
    )
    .stat("max_rel_error", max_trip);
    vec![signature, round_trip]
}

/// The alternating face sum vanishes for six points of one line.
pub fn coboundary(cfg: &RunConfig) -> Check {
    let (n, m) = (cfg.n, cfg.samples);
    if m == 0 {
        return Check::new("alternating_sum", true, "no samples");
    }
    let results = sample_map(m, cfg.seed, 0x7072_0007, |_, r| {
        let t: [ProjPoint; 6] = random_line_tuple(n, 6, 0.9, r)?.try_into().expect("six points");
        coboundary_check(&t, &cfg.quad)
    });
    let (max, errors, first) = max_ok(&results);
    let tol = cfg.tolerances.coboundary;
    Check::new(
        "alternating_sum",
        errors == 0 && max <= tol,
        format!("max |sum|/v4 {max:.3e} over {m} six-tuples{}", error_note(errors, &first)),
    )
    .stat("samples", m)
    .stat("max_rel_sum", max)
    .stat("errors", errors)
}

/// The regular triple at disc radius `rho` on the first complex line.
pub fn regular_complex_triple(n: usize, rho: f64) -> [ProjPoint; 3] {
    std::array::from_fn(|k| {
        let th = 2.0 * PI * k as f64 / 3.0;
        let mut c = vec![Quaternion::ZERO; n];
        c[0] = Quaternion::complex(rho * th.cos(), rho * th.sin());
        ProjPoint::from_disc(&c).expect("interior")
    })
}

fn random_disc_point<R: Rng + ?Sized>(r_max: f64, rng: &mut R) -> KleinPoint2 {
    let th = rng.gen_range(0.0..2.0 * PI);
    let rho = r_max * rng.gen::<f64>().sqrt();
    KleinPoint([rho * th.cos(), rho * th.sin()])
}

/// Complex-line triangle areas stay below `pi`, approach it at ideal
/// vertices and match the angle defect.
pub fn complex(cfg: &RunConfig) -> Vec<Check> {
    vec![complex_below_pi(cfg), complex_near_ideal(cfg), complex_defect(cfg)]
}

pub fn complex_below_pi(cfg: &RunConfig) -> Check {
    let (n, m) = (cfg.n, cfg.samples);
    let results = sample_map(m, cfg.seed, 0x7072_0008, |_, r| {
        let t: [ProjPoint; 3] = std::array::from_fn(|_| random_complex_point(n, 0.99, r));
        evaluate_complex(&t, &cfg.quad).map(f64::abs)
    });
    let (max, errors, first) = max_ok(&results);
    Check::new(
        "area_below_pi",
        errors == 0 && max < PI,
        format!("n={n}: max |area| {max:.9} over {m} triples{}", error_note(errors, &first)),
    )
    .stat("samples", m)
    .stat("max_abs_area", max)
    .stat("errors", errors)
}

pub fn complex_near_ideal(cfg: &RunConfig) -> Check {
    let near = evaluate_complex(&regular_complex_triple(cfg.n, NEAR_IDEAL_RHO), &cfg.quad);
    let tol = cfg.tolerances.ideal_triangle;
    match near {
        Ok(a) => {
            let gap = PI - a.abs();
            Check::new(
                "near_ideal",
                gap.abs() <= tol,
                format!("area {a:.9} at disc radius 1-{:.0e}, pi - |area| = {gap:.3e}", 1.0 - NEAR_IDEAL_RHO),
            )
            .stat("area", a)
            .stat("gap", gap)
        }
        Err(e) => Check::new("near_ideal", false, format!("evaluation failed: {e}")),
    }
}

/// Quadrature areas of random interior triangles against the angle
/// defect, with the quadrature tolerance a thousandth of the check's.
pub fn complex_defect(cfg: &RunConfig) -> Check {
    let m = cfg.samples;
    let tol = cfg.tolerances.defect;
    let quad = QuadConfig {
        tol: tol * 1e-3,
        ..cfg.quad.clone()
    };
    let results = sample_map(m, cfg.seed, 0x7072_0009, |_, r| {
        let v: [KleinPoint2; 3] = std::array::from_fn(|_| random_disc_point(0.95, r));
        let q = triangle_area_h2(v, &quad)?.value.abs();
        let d = angle_defect_area(v[0].0, v[1].0, v[2].0)?;
        Ok((q - d).abs())
    });
    let (max, errors, first) = max_ok(&results);
    Check::new(
        "angle_defect",
        errors == 0 && max <= tol,
        format!("max |quadrature - angle defect| {max:.3e} over {m} triangles{}", error_note(errors, &first)),
    )
    .stat("samples", m)
    .stat("max_abs_diff", max)
    .stat("errors", errors)
}
