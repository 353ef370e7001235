//! Independent reference computations used to cross-check the quadrature.
//!
//! These share no code with `hyp4`'s cubature: the Monte Carlo estimate
//! samples the bounding box of a simplex directly, and the angle defect
//! uses only hyperboloid inner products.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: usize,
}

const CHUNK: usize = 1 << 16;

/// Unsigned hyperbolic volume of the Klein simplex with vertices `verts`,
/// by uniform rejection sampling in its bounding box.
///
/// Work is split into fixed chunks with their own seeds, and the partial
/// sums are combined in chunk order, so the result is independent of the
/// number of threads.
pub fn monte_carlo_volume<const D: usize, const V: usize>(
    verts: &[[f64; D]; V],
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::InvalidInput("need at least two samples".into()));
    }
    if verts.iter().any(|v| v.iter().map(|c| c * c).sum::<f64>() >= 1.0) {
        return Err(Error::SingularInput);
    }
    let mut lo = [f64::INFINITY; D];
    let mut hi = [f64::NEG_INFINITY; D];
    for v in verts {
        for k in 0..D {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let box_vol: f64 = (0..D).map(|k| hi[k] - lo[k]).product();
    let Some(inv) = barycentric_map(verts) else {
        return Ok(McEstimate {
            mean: 0.0,
            std_err: 0.0,
            samples,
        });
    };

    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let count = CHUNK.min(samples - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let mut x = [0.0; D];
                for k in 0..D {
                    x[k] = rng.gen_range(lo[k]..=hi[k]);
                }
                if inside(&inv, &verts[0], &x) {
                    let r2: f64 = x.iter().map(|c| c * c).sum();
                    let f = (1.0 - r2).powf(-(D as f64 + 1.0) / 2.0);
                    s1 += f;
                    s2 += f * f;
                }
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = partial
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    Ok(McEstimate {
        mean: box_vol * mean,
        std_err: box_vol * (var / n).sqrt(),
        samples,
    })
}

/// Inverse of the edge matrix `[v1 - v0, ..., vD - v0]` (columns), or
/// `None` when the simplex is flat.
fn barycentric_map<const D: usize, const V: usize>(verts: &[[f64; D]; V]) -> Option<Vec<Vec<f64>>> {
    let mut a = vec![vec![0.0; 2 * D]; D];
    for r in 0..D {
        for c in 0..D {
            a[r][c] = verts[c + 1][r] - verts[0][r];
        }
        a[r][D + r] = 1.0;
    }
    for col in 0..D {
        let p = (col..D).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, p);
        let piv = a[col][col];
        a[col].iter_mut().for_each(|x| *x /= piv);
        for r in 0..D {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    let row = a[col].clone();
                    a[r].iter_mut().zip(&row).for_each(|(x, y)| *x -= f * y);
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[D..].to_vec()).collect())
}

fn inside<const D: usize>(inv: &[Vec<f64>], v0: &[f64; D], x: &[f64; D]) -> bool {
    let mut sum = 0.0;
    for row in inv {
        let l: f64 = row.iter().zip(x.iter().zip(v0)).map(|(m, (a, b))| m * (a - b)).sum();
        if l < 0.0 {
            return false;
        }
        sum += l;
    }
    sum <= 1.0
}

/// Area of the hyperbolic triangle with Klein vertices `a, b, c` as the
/// angle defect `pi - (alpha + beta + gamma)`, angles from tangent vectors
/// on the hyperboloid.
pub fn angle_defect_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> Result<f64> {
    let lift = |p: [f64; 2]| -> Result<[f64; 3]> {
        let s = 1.0 - p[0] * p[0] - p[1] * p[1];
        if s <= 0.0 {
            return Err(Error::SingularInput);
        }
        let t = 1.0 / s.sqrt();
        Ok([p[0] * t, p[1] * t, t])
    };
    let mink = |u: &[f64; 3], v: &[f64; 3]| u[0] * v[0] + u[1] * v[1] - u[2] * v[2];
    let (pa, pb, pc) = (lift(a)?, lift(b)?, lift(c)?);
    let angle = |p: &[f64; 3], q: &[f64; 3], r: &[f64; 3]| -> f64 {
        // Tangent directions at p: q + <p,q> p and r + <p,r> p.
        let (pq, pr) = (mink(p, q), mink(p, r));
        let u: [f64; 3] = std::array::from_fn(|k| q[k] + pq * p[k]);
        let v: [f64; 3] = std::array::from_fn(|k| r[k] + pr * p[k]);
        let cos = mink(&u, &v) / (mink(&u, &u) * mink(&v, &v)).sqrt();
        cos.clamp(-1.0, 1.0).acos()
    };
    let sum = angle(&pa, &pb, &pc) + angle(&pb, &pc, &pa) + angle(&pc, &pa, &pb);
    Ok(std::f64::consts::PI - sum)
}

/// Area of a triangle with side lengths `a, b, c` from the hyperbolic law
/// of cosines and Gauss-Bonnet.
pub fn gauss_bonnet_area(a: f64, b: f64, c: f64) -> f64 {
    let angle = |opp: f64, s1: f64, s2: f64| {
        let cos = (s1.cosh() * s2.cosh() - opp.cosh()) / (s1.sinh() * s2.sinh());
        cos.clamp(-1.0, 1.0).acos()
    };
    std::f64::consts::PI - angle(a, b, c) - angle(b, c, a) - angle(c, a, b)
}
