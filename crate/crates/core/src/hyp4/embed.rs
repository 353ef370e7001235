//! Distance-geometry embedding into the hyperboloid and Klein models.
//!
//! Points of a hyperboloid `{X : <X,X> = -1, t > 0}` in Minkowski space
//! `R^{K,1}` satisfy `<X_i, X_j> = -cosh d_ij`. Given the `-cosh` matrix of a
//! configuration, its eigendecomposition recovers coordinates up to an
//! isometry, provided the matrix has at most `K` positive and exactly one
//! negative eigenvalue.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::lines::cosh_dist;
use crate::pvspace::ProjPoint;

use super::{HyperboloidPoint, KleinPoint};

/// Eigenvalues below this fraction of the largest magnitude count as zero.
pub const SIGNATURE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct GramEmbedding<const K: usize> {
    pub hyperboloid: Vec<HyperboloidPoint<K>>,
    pub klein: Vec<KleinPoint<K>>,
    /// Eigenvalues of the `-cosh d` matrix, sorted descending.
    pub eigenvalues: Vec<f64>,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    /// Largest error of the reconstructed distances, relative above 1.
    pub distance_residual: f64,
}

/// Matrix of `cosh d(p_i, p_j)`.
pub fn cosh_matrix(points: &[ProjPoint]) -> Result<DMatrix<f64>> {
    let m = points.len();
    let mut c = DMatrix::from_element(m, m, 1.0);
    for i in 0..m {
        for j in (i + 1)..m {
            let v = cosh_dist(&points[i], &points[j])?;
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}

/// Embeds points of one quaternionic (`K = 4`) or complex (`K = 2`) line
/// into `H^K_R(-1)` from their pairwise distances alone.
pub fn gram_embed<const K: usize>(points: &[ProjPoint]) -> Result<GramEmbedding<K>> {
    embed_cosh_matrix(&cosh_matrix(points)?)
}

/// Reconstructs hyperboloid coordinates from a `cosh d` matrix.
///
/// Eigenpairs are sorted by descending eigenvalue and each eigenvector is
/// signed so its largest-magnitude entry is positive, so the output is a
/// deterministic function of the input. The time axis is flipped to the
/// upper sheet.
pub fn embed_cosh_matrix<const K: usize>(cosh: &DMatrix<f64>) -> Result<GramEmbedding<K>> {
    let m = cosh.nrows();
    if m == 0 || cosh.ncols() != m {
        return Err(Error::InvalidInput("cosh matrix must be square and nonempty".into()));
    }
    if m == 1 {
        return Ok(GramEmbedding {
            hyperboloid: vec![HyperboloidPoint::origin()],
            klein: vec![KleinPoint::origin()],
            eigenvalues: vec![-1.0],
            positive: 0,
            negative: 1,
            zero: 0,
            distance_residual: 0.0,
        });
    }
    let gram = -cosh.clone();
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let scale = eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let thresh = SIGNATURE_TOL * scale;
    let positive = eigenvalues.iter().filter(|&&l| l > thresh).count();
    let negative = eigenvalues.iter().filter(|&&l| l < -thresh).count();
    let zero = m - positive - negative;
    if negative != 1 || positive > K {
        return Err(Error::Calibration {
            positive,
            negative,
            zero,
            dim: K,
        });
    }

    let signed_vector = |k: usize| -> Vec<f64> {
        let col = eig.eigenvectors.column(k);
        let mut best = 0;
        for i in 1..m {
            if col[i].abs() > col[best].abs() {
                best = i;
            }
        }
        let s = if col[best] < 0.0 { -1.0 } else { 1.0 };
        col.iter().map(|x| s * x).collect()
    };

    let mut space = vec![[0.0f64; K]; m];
    for (axis, &k) in order.iter().take(positive).enumerate() {
        let v = signed_vector(k);
        let r = eig.eigenvalues[k].sqrt();
        for i in 0..m {
            space[i][axis] = r * v[i];
        }
    }
    let kneg = order[m - 1];
    let v = signed_vector(kneg);
    let r = (-eig.eigenvalues[kneg]).sqrt();
    let mut time: Vec<f64> = v.iter().map(|x| r * x).collect();
    if time.iter().sum::<f64>() < 0.0 {
        time.iter_mut().for_each(|t| *t = -*t);
    }
    if time.iter().any(|&t| t <= 0.0) {
        return Err(Error::Calibration {
            positive,
            negative,
            zero,
            dim: K,
        });
    }

    // The eigenvector only fixes the sheet; recomputing t from the spatial
    // part keeps far points exactly on the hyperboloid, so their Klein
    // images stay strictly inside the ball.
    let hyperboloid: Vec<HyperboloidPoint<K>> = space
        .into_iter()
        .map(|x| HyperboloidPoint {
            space: x,
            t: (1.0 + x.iter().map(|c| c * c).sum::<f64>()).sqrt(),
        })
        .collect();
    let klein = hyperboloid.iter().map(HyperboloidPoint::to_klein).collect();

    let mut distance_residual: f64 = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            let d_in = cosh[(i, j)].max(1.0).acosh();
            let d_out = hyperboloid[i].cosh_dist(&hyperboloid[j]).max(1.0).acosh();
            let err = (d_in - d_out).abs() / d_in.max(1.0);
            distance_residual = distance_residual.max(err);
        }
    }

    Ok(GramEmbedding {
        hyperboloid,
        klein,
        eigenvalues,
        positive,
        negative,
        zero,
        distance_residual,
    })
}
