//! Acceptance battery. Each criterion prints one PASS/FAIL line; the
//! binary exits nonzero if any criterion fails.
//!
//! Thresholds are restated here as literals and checked against the
//! statistics each criterion reports, alongside the check's own verdict.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use qkahler::hyp4::v4_const;
use qkahler_cli::criteria;
use qkahler_cli::{Check, RunConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn stat(c: &Check, key: &str) -> f64 {
    c.get_f64(key).unwrap_or(f64::NAN)
}

fn within(c: &Check, key: &str, max: f64) -> Result<(), String> {
    let v = stat(c, key);
    if v <= max {
        Ok(())
    } else {
        Err(format!("{key} = {v:e} exceeds {max:e}"))
    }
}

fn at_least(c: &Check, key: &str, min: f64) -> Result<(), String> {
    let v = stat(c, key);
    if v >= min {
        Ok(())
    } else {
        Err(format!("{key} = {v:e} below {min:e}"))
    }
}

fn verdict(c: &Check, extra: Vec<Result<(), String>>) -> Outcome {
    let mut problems: Vec<String> = extra.into_iter().filter_map(Result::err).collect();
    if !c.passed() {
        problems.push("check reported failure".into());
    }
    let pass = problems.is_empty();
    let detail = if pass {
        c.detail.clone()
    } else {
        format!("{} [{}]", c.detail, problems.join("; "))
    };
    Outcome { pass, detail }
}

fn criterion_1() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_qkahler")).args(["volume", "v4"]).output();
    let out = match out {
        Ok(o) => o,
        Err(e) => return Outcome { pass: false, detail: format!("could not run the binary: {e}") },
    };
    let stdout = String::from_utf8_lossy(&out.stdout);
    let value = stdout
        .split("v4 = ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse::<f64>().ok());
    match value {
        Some(v) if out.status.success() => Outcome {
            pass: (v - 0.2688957).abs() <= 1e-6,
            detail: format!("`volume v4` printed {v}, |v - 0.2688957| = {:.1e}", (v - 0.2688957).abs()),
        },
        _ => Outcome { pass: false, detail: format!("unexpected output: {stdout}") },
    }
}

fn run(k: usize, cfg: &RunConfig) -> Outcome {
    if k == 1 {
        return criterion_1();
    }
    let c = match criteria::run(k, cfg) {
        Ok(c) => c,
        Err(e) => return Outcome { pass: false, detail: format!("error: {e:#}") },
    };
    let v4 = v4_const();
    let extra = match k {
        2 => vec![within(&c, "ideal_regular.gap", 1e-3)],
        3 => vec![
            within(&c, "n2.max_imag_ratio", 1e-8),
            within(&c, "n3.max_imag_ratio", 1e-8),
            at_least(&c, "n2.samples", 1e4),
            at_least(&c, "n3.samples", 1e4),
        ],
        4 => vec![
            at_least(&c, "constructed_real.real", 1e4),
            at_least(&c, "generic_nonreal.fraction", 0.99),
        ],
        5 => vec![
            at_least(&c, "signature.good", 100.0),
            within(&c, "signature.max_zero_rel", 1e-8),
            within(&c, "round_trip.max_rel_error", 1e-8),
        ],
        6 => vec![
            within(&c, "cross_line.max_rel_gap", 1e-4),
            within(&c, "totally_real_vanish.max_rel_value", 1e-8),
            at_least(&c, "cross_line.samples", 100.0),
        ],
        7 => vec![
            within(&c, "alternating_sum.max_rel_sum", 1e-6),
            at_least(&c, "alternating_sum.samples", 100.0),
        ],
        8 => vec![
            within(&c, "random_sweep.max_abs", v4 + 1e-6),
            at_least(&c, "random_sweep.samples", 1e5),
            at_least(&c, "search_n2.best_value", 0.95 * v4),
            within(&c, "search_n2.best_value", v4 + 1e-6),
            at_least(&c, "search_n1_regular.best_value", v4 - 1e-3),
            within(&c, "search_n1_regular.best_value", v4 + 1e-6),
        ],
        9 => vec![
            within(&c, "area_below_pi.max_abs_area", PI - f64::EPSILON),
            at_least(&c, "area_below_pi.samples", 1e4),
            within(&c, "near_ideal.gap", 1e-4),
            at_least(&c, "near_ideal.gap", -1e-4),
            within(&c, "angle_defect.max_abs_diff", 1e-8),
        ],
        10 => vec![within(&c, "monte_carlo.worst_sigma", 3.0), at_least(&c, "monte_carlo.simplices", 10.0)],
        _ => vec![],
    };
    verdict(&c, extra)
}

/// Runtime limits in seconds.
const LIMITS: [f64; 10] = [5.0, 120.0, 60.0, 60.0, 60.0, 300.0, 120.0, 900.0, 120.0, 300.0];

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let mut failed = Vec::new();
    for k in 1..=10 {
        let start = Instant::now();
        let mut o = run(k, &cfg);
        let secs = start.elapsed().as_secs_f64();
        if secs > LIMITS[k - 1] {
            o.pass = false;
            o.detail = format!("{} [took {secs:.1}s, limit {}s]", o.detail, LIMITS[k - 1]);
        }
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2} {tag} {} ({secs:.1}s): {}", criteria::name(k), o.detail);
        if !o.pass {
            failed.push(k);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of 10 criteria passed; failed: {failed:?}", 10 - failed.len());
        ExitCode::FAILURE
    }
}
