//! Adaptive cubature over Euclidean simplices.
//!
//! Each cell is integrated with a Grundmann-Moller rule of degree `2s+1`
//! and the embedded rule of degree `2s-1` (which reuses a subset of its
//! nodes); their difference is the cell's error estimate. The cell with the
//! largest estimate is split by bisecting its longest edge until the total
//! estimate meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// A symmetric rule on the `D`-simplex in barycentric coordinates, paired
/// with its embedded lower-degree rule. Weights sum to one.
#[derive(Clone, Debug)]
pub struct SimplexRule {
    /// Barycentric nodes, `D + 1` coordinates each.
    pub nodes: Vec<Vec<f64>>,
    pub weights_hi: Vec<f64>,
    pub weights_lo: Vec<f64>,
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Node groups and raw weights of the Grundmann-Moller rule of index `s`
/// (degree `2s + 1`) on the `dim`-simplex, keyed by the denominator.
fn gm_groups(dim: usize, s: usize) -> Vec<(usize, f64)> {
    let d = 2 * s + 1;
    (0..=s)
        .map(|i| {
            let denom = d + dim - 2 * i;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let w = sign * 2f64.powi(-2 * s as i32) * (denom as f64).powi(d as i32)
                / (factorial(i) * factorial(d + dim - i));
            (denom, w * factorial(dim))
        })
        .collect()
}

impl SimplexRule {
    /// Grundmann-Moller pair of degrees `2s+1` and `2s-1`, `s >= 1`.
    pub fn grundmann_moller(dim: usize, s: usize) -> Self {
        assert!(s >= 1, "embedded rule needs s >= 1");
        let hi = gm_groups(dim, s);
        let lo = gm_groups(dim, s - 1);
        let mut nodes = Vec::new();
        let mut weights_hi = Vec::new();
        let mut weights_lo = Vec::new();
        for (i, &(denom, w)) in hi.iter().enumerate() {
            // The lower rule's groups are the higher rule's groups from i = 1 on.
            let wl = if i >= 1 {
                debug_assert_eq!(lo[i - 1].0, denom);
                lo[i - 1].1
            } else {
                0.0
            };
            for beta in compositions(s - i, dim + 1) {
                nodes.push(
                    beta.iter()
                        .map(|&b| (2 * b + 1) as f64 / denom as f64)
                        .collect(),
                );
                weights_hi.push(w);
                weights_lo.push(wl);
            }
        }
        Self {
            nodes,
            weights_hi,
            weights_lo,
        }
    }
}

/// Adaptive cubature parameters.
#[derive(Clone, Copy, Debug)]
pub struct CubatureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_cells: usize,
}

/// Result of an adaptive cubature run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cubature {
    pub value: f64,
    pub err_est: f64,
    pub cells: usize,
}

struct Cell<const D: usize, const V: usize> {
    verts: [[f64; D]; V],
    value: f64,
    err: f64,
}

impl<const D: usize, const V: usize> PartialEq for Cell<D, V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl<const D: usize, const V: usize> Eq for Cell<D, V> {}

impl<const D: usize, const V: usize> PartialOrd for Cell<D, V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<const D: usize, const V: usize> Ord for Cell<D, V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Unsigned Euclidean volume of a simplex.
pub fn euclidean_volume<const D: usize, const V: usize>(verts: &[[f64; D]; V]) -> f64 {
    edge_determinant(verts).abs() / factorial(D)
}

/// `det[v1 - v0, ..., vD - v0]` by Gaussian elimination with partial pivoting.
pub fn edge_determinant<const D: usize, const V: usize>(verts: &[[f64; D]; V]) -> f64 {
    debug_assert_eq!(V, D + 1);
    let mut m = [[0.0f64; D]; D];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, x) in row.iter_mut().enumerate() {
            *x = verts[r + 1][c] - verts[0][c];
        }
    }
    let mut det = 1.0;
    for col in 0..D {
        let piv = (col..D)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap_or(col);
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in (col + 1)..D {
            let f = m[r][col] / m[col][col];
            for c in col..D {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

fn eval_cell<const D: usize, const V: usize, F: Fn(&[f64; D]) -> f64>(
    verts: [[f64; D]; V],
    rule: &SimplexRule,
    f: &F,
) -> Cell<D, V> {
    let vol = euclidean_volume(&verts);
    let mut hi = 0.0;
    let mut lo = 0.0;
    for ((bary, &wh), &wl) in rule.nodes.iter().zip(&rule.weights_hi).zip(&rule.weights_lo) {
        let mut x = [0.0; D];
        for (b, v) in bary.iter().zip(verts.iter()) {
            for (xc, vc) in x.iter_mut().zip(v) {
                *xc += b * vc;
            }
        }
        let fx = f(&x);
        hi += wh * fx;
        lo += wl * fx;
    }
    Cell {
        verts,
        value: vol * hi,
        err: vol * (hi - lo).abs(),
    }
}

fn bisect<const D: usize, const V: usize>(verts: &[[f64; D]; V]) -> ([[f64; D]; V], [[f64; D]; V]) {
    let mut best = (0, 1, -1.0);
    for a in 0..V {
        for b in (a + 1)..V {
            let l: f64 = verts[a]
                .iter()
                .zip(&verts[b])
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            if l > best.2 {
                best = (a, b, l);
            }
        }
    }
    let (a, b, _) = best;
    let mut mid = [0.0; D];
    for (m, (x, y)) in mid.iter_mut().zip(verts[a].iter().zip(&verts[b])) {
        *m = 0.5 * (x + y);
    }
    let mut left = *verts;
    let mut right = *verts;
    left[b] = mid;
    right[a] = mid;
    (left, right)
}

/// Integrates `f` over the simplex with the given vertices.
///
/// Deterministic: the refinement sequence and the final summation order
/// depend only on the inputs.
pub fn integrate<const D: usize, const V: usize, F: Fn(&[f64; D]) -> f64>(
    verts: [[f64; D]; V],
    rule: &SimplexRule,
    opts: &CubatureOptions,
    f: F,
) -> Result<Cubature> {
    let mut heap = BinaryHeap::new();
    let root = eval_cell(verts, rule, &f);
    let mut total = root.value;
    let mut total_err = root.err;
    heap.push(root);
    let mut since_resum = 0usize;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::QuadratureFailure {
                value: total,
                err_est: total_err,
                cells: heap.len(),
            });
        }
        if total_err <= (opts.rel_tol * total.abs()).max(opts.abs_tol) {
            break;
        }
        if heap.len() >= opts.max_cells {
            return Err(Error::QuadratureFailure {
                value: total,
                err_est: total_err,
                cells: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let (l, r) = bisect(&worst.verts);
        let (cl, cr) = (eval_cell(l, rule, &f), eval_cell(r, rule, &f));
        total += cl.value + cr.value - worst.value;
        total_err += cl.err + cr.err - worst.err;
        heap.push(cl);
        heap.push(cr);
        since_resum += 1;
        if since_resum == 1024 {
            since_resum = 0;
            total = heap.iter().map(|c| c.value).sum();
            total_err = heap.iter().map(|c| c.err).sum();
        }
    }
    let cells = heap.into_vec();
    Ok(Cubature {
        value: cells.iter().map(|c| c.value).sum(),
        err_est: cells.iter().map(|c| c.err).sum(),
        cells: cells.len(),
    })
}
