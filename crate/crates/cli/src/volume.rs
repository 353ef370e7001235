//! `volume`, `cocycle` and `search` subcommands.

use std::path::Path;

use anyhow::Context;
use qkahler::cocycle::{evaluate, sup_search, EvalOptions, SearchConfig};
use qkahler::hyp4::{
    extrapolate_ideal, regular_simplex, simplex_volume, v4_const, KleinPoint, QuadConfig, Simplex4, Triangle2,
};
use qkahler::pvspace::{PointFile, ProjPoint};
use serde::Deserialize;

use crate::config::RunConfig;
use crate::report::Check;

pub fn v4() -> Check {
    let v = v4_const();
    Check::new("closed_form", v.is_finite() && v > 0.0, format!("v4 = {v:.15}")).stat("v4", v)
}

/// Volume of the regular simplex inscribed at Klein radius `r < 1`.
pub fn regular(r: f64, quad: &QuadConfig) -> anyhow::Result<Check> {
    anyhow::ensure!(r > 0.0 && r < 1.0, "radius must lie in (0, 1); use `ideal` for r = 1");
    let v = simplex_volume(&Simplex4::new(regular_simplex(r)), quad)?;
    let v4 = v4_const();
    Ok(Check::new(
        "regular",
        v.value > 0.0 && v.value < v4,
        format!("r = {r}: volume {:.12} +- {:.1e} ({} cells), v4 - volume = {:.3e}", v.value, v.err_est, v.cells, v4 - v.value),
    )
    .stat("r", r)
    .stat("value", v.value)
    .stat("err_est", v.err_est)
    .stat("cells", v.cells)
    .stat("v4", v4))
}

/// Ideal regular simplex volume by extrapolation in the radius.
pub fn ideal(quad: &QuadConfig, tol: f64) -> Check {
    let family = |r: f64| simplex_volume(&Simplex4::new(regular_simplex(r)), quad).map(|v| v.value);
    let v4 = v4_const();
    match extrapolate_ideal(family, &quad.ideal_schedule) {
        Ok(x) => {
            let gap = (x.value - v4).abs();
            Check::new(
                "ideal_regular",
                gap <= tol,
                format!("extrapolated {:.12} (bound {:.1e}), |value - v4| = {gap:.3e}", x.value, x.err_bound),
            )
            .stat("value", x.value)
            .stat("err_bound", x.err_bound)
            .stat("gap", gap)
            .stat("samples", &x.samples)
            .stat("v4", v4)
        }
        Err(e) => Check::new("ideal_regular", false, format!("extrapolation failed: {e}")),
    }
}

/// Klein vertices: five points of the 4-ball or three of the disc.
#[derive(Deserialize)]
struct VertexFile {
    vertices: Vec<Vec<f64>>,
}

pub fn vertex_file(path: &Path, quad: &QuadConfig) -> anyhow::Result<Check> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: VertexFile =
        serde_json::from_str(&text).with_context(|| format!("malformed vertex file {}", path.display()))?;
    let v = &file.vertices;
    let vol = match (v.len(), v.iter().map(Vec::len).max(), v.iter().map(Vec::len).min()) {
        (5, Some(4), Some(4)) => {
            let k: [KleinPoint<4>; 5] = std::array::from_fn(|i| KleinPoint(std::array::from_fn(|j| v[i][j])));
            simplex_volume(&Simplex4::new(k), quad)?
        }
        (3, Some(2), Some(2)) => {
            let k: [KleinPoint<2>; 3] = std::array::from_fn(|i| KleinPoint(std::array::from_fn(|j| v[i][j])));
            simplex_volume(&Triangle2::new(k), quad)?
        }
        _ => anyhow::bail!("malformed vertex file: expected 5 vertices in R^4 or 3 in R^2"),
    };
    Ok(Check::new(
        "file",
        vol.value.is_finite(),
        format!("signed volume {:.12} +- {:.1e} ({} cells)", vol.value, vol.err_est, vol.cells),
    )
    .stat("value", vol.value)
    .stat("err_est", vol.err_est)
    .stat("cells", vol.cells))
}

pub fn read_points(path: &Path) -> anyhow::Result<Vec<ProjPoint>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: PointFile =
        serde_json::from_str(&text).with_context(|| format!("malformed point file {}", path.display()))?;
    Ok(file.to_points()?)
}

/// Evaluates the cocycle on the five points of a point file.
pub fn cocycle_file(path: &Path, cfg: &RunConfig) -> anyhow::Result<Check> {
    let points = read_points(path)?;
    let t: [ProjPoint; 5] = points
        .try_into()
        .map_err(|p: Vec<ProjPoint>| anyhow::anyhow!("expected 5 points, found {}", p.len()))?;
    let opts = EvalOptions {
        quad: cfg.quad.clone(),
        ..EvalOptions::default()
    };
    let c = evaluate(&t, &opts)?;
    let v4 = v4_const();
    Ok(Check::new(
        "within_bound",
        !c.bound_violation,
        format!(
            "c = {:.12} +- {:.1e}, |c|/v4 = {:.9}, line {:?}",
            c.value,
            c.quad_err,
            c.abs_value / v4,
            c.line_used
        ),
    )
    .stat("value", c.value)
    .stat("abs_value", c.abs_value)
    .stat("ratio", c.abs_value / v4)
    .stat("quad_err", c.quad_err)
    .stat("gram_residual", c.gram_residual)
    .stat("line_used", c.line_used))
}

/// Runs the sup search; the check fails on any certified bound violation.
pub fn search(cfg: &SearchConfig, bound_tol: f64) -> anyhow::Result<Check> {
    let s = sup_search(cfg)?;
    let v4 = v4_const();
    let ok = !s.violation && s.best_value <= v4 + bound_tol;
    let tuple = if s.best_tuple.is_empty() {
        None
    } else {
        Some(PointFile::from_points(&s.best_tuple)?)
    };
    Ok(Check::new(
        "bound",
        ok,
        format!(
            "n={}: best |c| {:.12} = {:.6} v4 after {} evaluations ({} failed)",
            cfg.n,
            s.best_value,
            s.best_value / v4,
            s.evaluations,
            s.failures
        ),
    )
    .stat("n", cfg.n)
    .stat("best_value", s.best_value)
    .stat("best_ratio", s.best_value / v4)
    .stat("best_err", s.best_err)
    .stat("best_tuple", tuple)
    .stat("trajectory", &s.trajectory)
    .stat("evaluations", s.evaluations)
    .stat("failures", s.failures)
    .stat("violation", s.violation)
    .stat("max_certified_excess", s.max_certified_excess))
}
