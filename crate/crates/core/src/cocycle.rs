//! Evaluation of the quaternionic Kahler cocycle on five points of `H^n_H`,
//! its consistency checks, the complex-hyperbolic analogue, and a search
//! for its supremum.
//!
//! A tuple is reduced onto the quaternionic line through two of its points,
//! the five reduced points are embedded in `H^4_R(-1)` from their distances,
//! and the signed Klein simplex volume is the value. The sign depends on the
//! embedding, so only absolute values are comparable across lines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp4::{gram_embed, simplex_volume, triangle_area_h2, v4_const, KleinPoint, QuadConfig, Simplex4};
use crate::lines::{line_through, project_to_line, reduce_onto, ScalarField};
use crate::pvspace::{is_totally_real_triple, random_point, random_real_point, normalize_lift, Isometry, ProjPoint};
use crate::quat::Quaternion;

/// Absolute slack on the bound `|c| <= v4` before an evaluation is flagged.
pub const BOUND_TOL: f64 = 1e-6;

/// Points whose normalized lifts agree to this are treated as repeated.
const REPEAT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    pub quad: QuadConfig,
    /// Return zero without integrating when the first three points are
    /// totally real.
    pub totally_real_shortcut: bool,
    pub shortcut_tol: f64,
    /// Project onto the line through `pair`; when false the points must
    /// already lie on one line.
    pub reduce: bool,
    pub pair: (usize, usize),
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            quad: QuadConfig::default(),
            totally_real_shortcut: true,
            shortcut_tol: 1e-9,
            reduce: true,
            pair: (0, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleValue {
    pub value: f64,
    pub abs_value: f64,
    pub line_used: (usize, usize),
    /// Largest of the reduction membership residual and the embedding
    /// distance residual.
    pub gram_residual: f64,
    pub quad_err: f64,
    /// Set when `abs_value - quad_err` exceeds `v4 + BOUND_TOL`.
    pub bound_violation: bool,
}

impl CocycleValue {
    fn zero(pair: (usize, usize)) -> Self {
        Self::new(0.0, pair, 0.0, 0.0)
    }

    fn new(value: f64, line_used: (usize, usize), gram_residual: f64, quad_err: f64) -> Self {
        let abs_value = value.abs();
        Self {
            value,
            abs_value,
            line_used,
            gram_residual,
            quad_err,
            bound_violation: abs_value - quad_err > v4_const() + BOUND_TOL,
        }
    }
}

fn has_repeat(t: &[ProjPoint]) -> bool {
    (0..t.len()).any(|i| ((i + 1)..t.len()).any(|j| t[i].approx_eq(&t[j], REPEAT_TOL)))
}

fn check_tuple(t: &[ProjPoint]) -> Result<usize> {
    let n = t[0].n();
    for p in t {
        if p.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                found: p.n() + 1,
            });
        }
        if !p.is_interior() {
            return Err(Error::InvalidInput("cocycle points must be interior".into()));
        }
    }
    Ok(n)
}

/// Signed volume of the simplex spanned by points of one line, embedded
/// together.
fn line_simplex(points: &[ProjPoint], quad: &QuadConfig) -> Result<(f64, f64, f64)> {
    let e = gram_embed::<4>(points)?;
    let k: [KleinPoint<4>; 5] = e.klein[..5].try_into().expect("five points");
    let v = simplex_volume(&Simplex4::new(k), quad)?;
    Ok((v.value, v.err_est, e.distance_residual))
}

/// Cocycle value of a five-tuple.
pub fn evaluate(t: &[ProjPoint; 5], opts: &EvalOptions) -> Result<CocycleValue> {
    let n = check_tuple(t)?;
    let pair = opts.pair;
    if pair.0 == pair.1 || pair.0 > 4 || pair.1 > 4 {
        return Err(Error::InvalidInput(format!("bad line pair {pair:?}")));
    }
    if has_repeat(t) {
        return Ok(CocycleValue::zero(pair));
    }
    if opts.totally_real_shortcut && is_totally_real_triple(&t[0], &t[1], &t[2], opts.shortcut_tol) {
        return Ok(CocycleValue::zero(pair));
    }
    let (points, residual) = if n == 1 || !opts.reduce {
        (t.to_vec(), 0.0)
    } else {
        let r = reduce_onto(t, pair.0, pair.1)?;
        (r.points, r.residual)
    };
    if has_repeat(&points) {
        return Ok(CocycleValue::zero(pair));
    }
    let (value, quad_err, dist_res) = line_simplex(&points, &opts.quad)?;
    Ok(CocycleValue::new(value, pair, residual.max(dist_res), quad_err))
}

/// Largest relative disagreement of `|c|` between reductions onto the
/// lines through the given pairs. Values below `1e-8 v4` count as zero.
pub fn cross_line_discrepancy(t: &[ProjPoint; 5], pairs: &[(usize, usize)], opts: &EvalOptions) -> Result<f64> {
    let vals = pairs
        .iter()
        .map(|&pair| {
            let o = EvalOptions { pair, ..opts.clone() };
            evaluate(t, &o).map(|c| c.abs_value)
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = 1e-8 * v4_const();
    let mut worst: f64 = 0.0;
    for i in 0..vals.len() {
        for j in (i + 1)..vals.len() {
            let scale = vals[i].max(vals[j]).max(floor);
            worst = worst.max((vals[i] - vals[j]).abs() / scale);
        }
    }
    Ok(worst)
}

/// Discrepancy between the reductions onto `L01` and `L23`, or onto all ten
/// lines when `all_pairs` is set.
pub fn cross_line_check(t: &[ProjPoint; 5], opts: &EvalOptions, all_pairs: bool) -> Result<f64> {
    let pairs: Vec<(usize, usize)> = if all_pairs {
        (0..5).flat_map(|i| ((i + 1)..5).map(move |j| (i, j))).collect()
    } else {
        vec![(0, 1), (2, 3)]
    };
    cross_line_discrepancy(t, &pairs, opts)
}

/// Signed volumes of the six faces of a six-point configuration on one
/// line, embedded together; face `i` omits vertex `i`.
pub fn face_volumes(t: &[ProjPoint; 6], quad: &QuadConfig) -> Result<[f64; 6]> {
    check_tuple(t)?;
    let e = gram_embed::<4>(t)?;
    let mut out = [0.0; 6];
    for (i, o) in out.iter_mut().enumerate() {
        let face: Vec<KleinPoint<4>> = (0..6).filter(|&k| k != i).map(|k| e.klein[k]).collect();
        let face: [KleinPoint<4>; 5] = face.try_into().expect("five vertices");
        *o = simplex_volume(&Simplex4::new(face), quad)?.value;
    }
    Ok(out)
}

/// `|sum_i (-1)^i vol(face_i)| / v4` for six points on one line.
pub fn coboundary_check(t: &[ProjPoint; 6], quad: &QuadConfig) -> Result<f64> {
    let f = face_volumes(t, quad)?;
    let sum: f64 = f
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { *v } else { -*v })
        .sum();
    Ok(sum.abs() / v4_const())
}

/// Signed area of the triangle `(v, w, Pi_L z)` on the complex line `L`
/// through `v` and `w`, for points of `H^n_C`.
pub fn evaluate_complex(t: &[ProjPoint; 3], quad: &QuadConfig) -> Result<f64> {
    check_tuple(t)?;
    if t.iter().any(|p| !p.lift().is_complex(1e-12)) {
        return Err(Error::InvalidInput("points must have complex coordinates".into()));
    }
    if has_repeat(t) {
        return Ok(0.0);
    }
    let line = line_through(&t[0], &t[1], ScalarField::Complex)?;
    let pz = project_to_line(&t[2], &line)?;
    let points = [t[0].clone(), t[1].clone(), pz];
    if has_repeat(&points) {
        return Ok(0.0);
    }
    let e = gram_embed::<2>(&points)?;
    Ok(triangle_area_h2([e.klein[0], e.klein[1], e.klein[2]], quad)?.value)
}

/// `k` points of a common totally real subspace: real points moved by a
/// random isometry, with lifts scaled by random unit quaternions.
pub fn random_totally_real_tuple<R: Rng + ?Sized>(n: usize, k: usize, r_max: f64, rng: &mut R) -> Vec<ProjPoint> {
    let g = Isometry::random(n, 1.0, rng);
    (0..k)
        .map(|_| {
            let p = random_real_point(n, r_max, rng);
            let l = Quaternion::new(rng.gen(), rng.gen(), rng.gen(), rng.gen())
                .unit()
                .unwrap_or(Quaternion::ONE);
            normalize_lift(&g.apply(p.lift()).mul_right(l)).expect("isometries preserve the interior")
        })
        .collect()
}

/// `k` random points of a random quaternionic line of `H^n_H`, with ball
/// coordinates of radius at most `r_max` on that line.
pub fn random_line_tuple<R: Rng + ?Sized>(n: usize, k: usize, r_max: f64, rng: &mut R) -> Result<Vec<ProjPoint>> {
    let (a, b) = loop {
        let a = random_point(n, 0.8, rng);
        let b = random_point(n, 0.8, rng);
        if !a.approx_eq(&b, 1e-6) {
            break (a, b);
        }
    };
    let line = line_through(&a, &b, ScalarField::Quaternionic)?;
    (0..k)
        .map(|_| {
            let p = random_point(1, r_max, rng);
            line.point_at(p.disc_coords().expect("interior")[0])
        })
        .collect()
}

/// A regular configuration on the first coordinate line of `H^n_H`: the
/// vertex directions of the regular 4-simplex at disc radius `rho`.
pub fn regular_tuple(n: usize, rho: f64) -> [ProjPoint; 5] {
    let k = crate::hyp4::regular_simplex(1.0);
    std::array::from_fn(|i| {
        let c = k[i].0;
        let mut coords = vec![Quaternion::ZERO; n];
        coords[0] = Quaternion::new(rho * c[0], rho * c[1], rho * c[2], rho * c[3]);
        ProjPoint::from_disc(&coords).expect("interior")
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub n: usize,
    pub seed: u64,
    pub restarts: usize,
    /// Nelder-Mead iterations per refined start and radius stage.
    pub iters: usize,
    /// Disc radius caps `1 - eps` for successive refinement stages.
    pub eps_schedule: Vec<f64>,
    /// Restart `i` samples points with disc radius at most
    /// `restart_radii[i % len]`.
    pub restart_radii: Vec<f64>,
    /// Number of best restarts that are refined.
    pub refine_top: usize,
    /// Also start from the regular configuration on a coordinate line.
    pub seed_regular: bool,
    /// Quadrature used inside the search loop.
    pub quad: QuadConfig,
    /// Quadrature for the final re-evaluation of the best tuple.
    pub final_quad: QuadConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n: 2,
            seed: 0,
            restarts: 200,
            iters: 500,
            eps_schedule: vec![1e-2, 1e-3, 1e-4, 1e-5],
            restart_radii: vec![0.9, 0.99, 0.999],
            refine_top: 4,
            seed_regular: false,
            quad: QuadConfig {
                tol: 1e-4,
                max_cells: 200_000,
                ..QuadConfig::default()
            },
            final_quad: QuadConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    /// `|c|` of `best_tuple` at the final quadrature tolerance.
    pub best_value: f64,
    pub best_err: f64,
    pub best_tuple: Vec<ProjPoint>,
    /// Best value after each refinement iteration.
    pub trajectory: Vec<f64>,
    pub evaluations: usize,
    pub failures: usize,
    /// Set when any evaluation exceeded `v4 + BOUND_TOL` beyond its error.
    pub violation: bool,
    pub max_certified_excess: f64,
}

struct Objective<'a> {
    cfg: &'a SearchConfig,
    opts: EvalOptions,
}

#[derive(Default)]
struct Tally {
    evaluations: usize,
    failures: usize,
    max_excess: f64,
}

impl Tally {
    fn record(&mut self, r: &Result<CocycleValue>) -> f64 {
        self.evaluations += 1;
        match r {
            Ok(c) => {
                self.max_excess = self.max_excess.max(c.abs_value - c.quad_err - v4_const());
                c.abs_value
            }
            Err(_) => {
                self.failures += 1;
                0.0
            }
        }
    }
}

impl Objective<'_> {
    fn eval(&self, t: &[ProjPoint; 5]) -> Result<CocycleValue> {
        evaluate(t, &self.opts)
    }

    /// Maps unconstrained coordinates to five points with disc radius below
    /// `1 - eps`: each point's block `y` goes to `(1 - eps) tanh|y| y/|y|`.
    fn decode(&self, x: &[f64], eps: f64) -> Result<[ProjPoint; 5]> {
        let n = self.cfg.n;
        let pts = (0..5)
            .map(|i| {
                let y = &x[i * 4 * n..(i + 1) * 4 * n];
                let norm = y.iter().map(|c| c * c).sum::<f64>().sqrt();
                let s = if norm > 0.0 { (1.0 - eps) * norm.tanh() / norm } else { 0.0 };
                let coords: Vec<Quaternion> = y
                    .chunks(4)
                    .map(|c| Quaternion::new(s * c[0], s * c[1], s * c[2], s * c[3]))
                    .collect();
                ProjPoint::from_disc(&coords)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(pts.try_into().expect("five points"))
    }

    fn encode(&self, t: &[ProjPoint], eps: f64) -> Vec<f64> {
        let mut x = Vec::with_capacity(20 * self.cfg.n);
        for p in t {
            let coords = p.disc_coords().expect("interior points have disc coordinates");
            let rho = p.disc_radius();
            let cap = (1.0 - eps) * (1.0 - 1e-12);
            let target = rho.min(cap) / (1.0 - eps);
            let s = if rho > 0.0 { target.atanh() / rho } else { 0.0 };
            for q in coords {
                x.extend(q.to_array().iter().map(|c| c * s));
            }
        }
        x
    }
}

/// Derivative-free local maximization with the adaptive-parameter
/// Nelder-Mead method. Returns the best point, its value, and the best value
/// after each iteration.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(x0: &[f64], step: f64, iters: usize, mut f: F) -> (Vec<f64>, f64, Vec<f64>) {
    let d = x0.len();
    let nd = d as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nd, 0.75 - 0.5 / nd, 1.0 - 1.0 / nd);
    // Minimize the negated objective.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), -f(x0)));
    for k in 0..d {
        let mut x = x0.to_vec();
        x[k] += step;
        let v = -f(&x);
        simplex.push((x, v));
    }
    let mut trajectory = Vec::with_capacity(iters);
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nd;
            }
        }
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
        };
        let worst = simplex[d].0.clone();
        let (fbest, fsecond, fworst) = (simplex[0].1, simplex[d - 1].1, simplex[d].1);
        let xr = along(alpha, &worst);
        let fr = -f(&xr);
        if fr < fbest {
            let xe = along(alpha * beta, &worst);
            let fe = -f(&xe);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < fsecond {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < fworst {
                let xc = along(alpha * gamma, &worst);
                let fc = -f(&xc);
                (xc, fc)
            } else {
                let xc = along(-gamma, &worst);
                let fc = -f(&xc);
                (xc, fc)
            };
            if fc < fr.min(fworst) {
                simplex[d] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, v) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + delta * (*xi - bi);
                    }
                    *v = -f(x);
                }
            }
        }
        let best = simplex.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        trajectory.push(-best);
    }
    let (x, v) = simplex
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("simplex is nonempty");
    (x, -v, trajectory)
}

/// Seeded search for the supremum of `|c|` over five-tuples in `H^n_H`.
///
/// Restarts are independent tasks keyed by `(seed, index)`; the best few
/// are refined by Nelder-Mead over the `20 n` disc coordinates, one stage
/// per entry of the radius schedule. The best tuple is re-evaluated with
/// `final_quad`.
pub fn sup_search(cfg: &SearchConfig) -> Result<SearchResult> {
    if cfg.n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    if cfg.eps_schedule.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::InvalidInput("eps schedule entries must lie in (0, 1)".into()));
    }
    let obj = Objective {
        cfg,
        opts: EvalOptions {
            quad: cfg.quad.clone(),
            ..EvalOptions::default()
        },
    };
    let first_eps = cfg.eps_schedule.first().copied().unwrap_or(1e-2);
    let radii = if cfg.restart_radii.is_empty() { vec![0.9] } else { cfg.restart_radii.clone() };

    let mut starts: Vec<[ProjPoint; 5]> = Vec::new();
    if cfg.seed_regular {
        starts.push(regular_tuple(cfg.n, 1.0 - first_eps));
    }
    starts.extend((0..cfg.restarts).map(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let r = radii[i % radii.len()];
        std::array::from_fn(|_| random_point(cfg.n, r, &mut rng))
    }));
    let scored: Vec<(Result<CocycleValue>, usize)> = starts
        .par_iter()
        .enumerate()
        .map(|(i, t)| (obj.eval(t), i))
        .collect();

    let mut tally = Tally::default();
    let mut ranked: Vec<(f64, usize)> = scored.iter().map(|(r, i)| (tally.record(r), *i)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut best: Option<(f64, [ProjPoint; 5])> = ranked.first().map(|&(v, i)| (v, starts[i].clone()));
    let mut trajectory = Vec::new();

    if cfg.iters > 0 && !cfg.eps_schedule.is_empty() {
        let refined: Vec<(f64, Option<[ProjPoint; 5]>, Vec<f64>, Tally)> = ranked
            .iter()
            .take(cfg.refine_top)
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&&(v0, i)| {
                let mut tally = Tally::default();
                let mut cur = starts[i].clone();
                let mut cur_v = v0;
                let mut traj = Vec::new();
                for &eps in &cfg.eps_schedule {
                    let x0 = obj.encode(&cur, eps);
                    let (x, v, t) = nelder_mead(&x0, 0.25, cfg.iters, |x| match obj.decode(x, eps) {
                        Ok(tuple) => tally.record(&obj.eval(&tuple)),
                        Err(_) => {
                            tally.failures += 1;
                            0.0
                        }
                    });
                    traj.extend(t.into_iter().map(|s| s.max(cur_v)));
                    if v > cur_v {
                        if let Ok(tuple) = obj.decode(&x, eps) {
                            cur = tuple;
                            cur_v = v;
                        }
                    }
                }
                (cur_v, Some(cur), traj, tally)
            })
            .collect();
        let mut running = best.as_ref().map_or(0.0, |b| b.0);
        for (v, tuple, traj, t) in refined {
            tally.evaluations += t.evaluations;
            tally.failures += t.failures;
            tally.max_excess = tally.max_excess.max(t.max_excess);
            for s in traj {
                running = running.max(s);
                trajectory.push(running);
            }
            if let Some(tuple) = tuple {
                if best.as_ref().is_none_or(|b| v > b.0) {
                    best = Some((v, tuple));
                }
            }
        }
    }

    let (best_value, best_err, best_tuple) = match best {
        Some((_, tuple)) => {
            let opts = EvalOptions {
                quad: cfg.final_quad.clone(),
                ..EvalOptions::default()
            };
            let c = evaluate(&tuple, &opts)?;
            tally.max_excess = tally.max_excess.max(c.abs_value - c.quad_err - v4_const());
            (c.abs_value, c.quad_err, tuple.to_vec())
        }
        None => (0.0, 0.0, vec![ProjPoint::origin(cfg.n); 5]),
    };
    Ok(SearchResult {
        best_value,
        best_err,
        best_tuple,
        trajectory,
        evaluations: tally.evaluations,
        failures: tally.failures,
        violation: tally.max_excess > BOUND_TOL || best_value > v4_const() + BOUND_TOL,
        max_certified_excess: tally.max_excess,
    })
}

#[cfg(test)]
mod tests;
