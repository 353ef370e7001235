//! Real hyperbolic backend: hyperboloid and Klein models of `H^2_R` and
//! `H^4_R` (curvature -1), geodesic simplex volumes, the constant `v4`, and
//! the ideal-vertex extrapolation.
//!
//! Geodesic simplices in the Klein model are Euclidean simplices, so a
//! signed volume is the orientation of the vertex determinant times the
//! integral of the density `(1 - |x|^2)^{-(D+1)/2}` over a flat simplex.

pub mod embed;
pub mod quadrature;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use quadrature::{edge_determinant, integrate, CubatureOptions, SimplexRule};

pub use embed::{cosh_matrix, embed_cosh_matrix, gram_embed, GramEmbedding, SIGNATURE_TOL};

/// Volume of the ideal regular simplex of `H^4_R(-1)`:
/// `(10 pi / 3) asin(1/3) - pi^2 / 3`.
pub fn v4_const() -> f64 {
    10.0 * PI / 3.0 * (1.0f64 / 3.0).asin() - PI * PI / 3.0
}

/// Quadrature settings shared by volume and area computations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    /// Relative error target.
    pub tol: f64,
    pub max_cells: usize,
    /// Exponents `k` of the radii `r_k = 1 - 2^-k` used for ideal limits.
    pub ideal_schedule: Vec<u32>,
    /// Absolute error floor, reached for (nearly) degenerate simplices.
    pub abs_tol: f64,
    /// Grundmann-Moller index `s` of the cell rule (degree `2s + 1`).
    pub rule_index: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_cells: 2_000_000,
            ideal_schedule: (4..=12).collect(),
            abs_tol: 1e-13,
            rule_index: 3,
        }
    }
}

impl QuadConfig {
    fn cubature(&self) -> CubatureOptions {
        CubatureOptions {
            rel_tol: self.tol,
            abs_tol: self.abs_tol,
            max_cells: self.max_cells,
        }
    }
}

/// A point of the Klein (projective) ball model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KleinPoint<const D: usize>(#[serde(with = "serde_arrays")] pub [f64; D]);

pub type KleinPoint4 = KleinPoint<4>;
pub type KleinPoint2 = KleinPoint<2>;

mod serde_arrays {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer, const D: usize>(a: &[f64; D], s: S) -> Result<S::Ok, S::Error> {
        a.as_slice().serialize(s)
    }

    pub fn deserialize<'de, De: Deserializer<'de>, const D: usize>(d: De) -> Result<[f64; D], De::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        let n = v.len();
        v.try_into()
            .map_err(|_| serde::de::Error::invalid_length(n, &"a coordinate array of the model dimension"))
    }
}

impl<const D: usize> KleinPoint<D> {
    pub fn origin() -> Self {
        Self([0.0; D])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn is_interior(&self) -> bool {
        self.norm_sqr() < 1.0
    }

    /// `cosh` of the hyperbolic distance between two interior points.
    pub fn cosh_dist(&self, other: &Self) -> f64 {
        let dot: f64 = self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum();
        (1.0 - dot) / ((1.0 - self.norm_sqr()) * (1.0 - other.norm_sqr())).sqrt()
    }

    pub fn to_hyperboloid(&self) -> Result<HyperboloidPoint<D>> {
        let s = 1.0 - self.norm_sqr();
        if s <= 0.0 {
            return Err(Error::SingularInput);
        }
        let t = 1.0 / s.sqrt();
        let mut space = self.0;
        space.iter_mut().for_each(|x| *x *= t);
        Ok(HyperboloidPoint { space, t })
    }
}

/// A point `(x, t)` on the upper sheet of `|x|^2 - t^2 = -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperboloidPoint<const D: usize> {
    pub space: [f64; D],
    pub t: f64,
}

impl<const D: usize> HyperboloidPoint<D> {
    pub fn origin() -> Self {
        Self {
            space: [0.0; D],
            t: 1.0,
        }
    }

    /// Minkowski product `x.y - s t`.
    pub fn minkowski(&self, other: &Self) -> f64 {
        let dot: f64 = self.space.iter().zip(&other.space).map(|(a, b)| a * b).sum();
        dot - self.t * other.t
    }

    pub fn cosh_dist(&self, other: &Self) -> f64 {
        -self.minkowski(other)
    }

    pub fn to_klein(&self) -> KleinPoint<D> {
        let mut x = self.space;
        x.iter_mut().for_each(|c| *c /= self.t);
        KleinPoint(x)
    }

    /// Lorentz boost of rapidity `phi` along spatial axis `axis`.
    pub fn boost(&self, axis: usize, phi: f64) -> Self {
        let (c, s) = (phi.cosh(), phi.sinh());
        let mut out = *self;
        out.space[axis] = c * self.space[axis] + s * self.t;
        out.t = s * self.space[axis] + c * self.t;
        out
    }

    /// Rotation by `theta` in the spatial plane `(a, b)`.
    pub fn rotate(&self, a: usize, b: usize, theta: f64) -> Self {
        let (c, s) = (theta.cos(), theta.sin());
        let mut out = *self;
        out.space[a] = c * self.space[a] - s * self.space[b];
        out.space[b] = s * self.space[a] + c * self.space[b];
        out
    }
}

/// Hyperbolic volume density of the Klein model, `(1 - |x|^2)^{-(D+1)/2}`.
pub fn klein_density<const D: usize>(x: &KleinPoint<D>) -> Result<f64> {
    let s = 1.0 - x.norm_sqr();
    if s <= 0.0 {
        return Err(Error::SingularInput);
    }
    Ok(density_raw::<D>(&x.0))
}

#[inline]
fn density_raw<const D: usize>(x: &[f64; D]) -> f64 {
    let s = 1.0 - x.iter().map(|c| c * c).sum::<f64>();
    if s <= 0.0 {
        return f64::INFINITY;
    }
    match D {
        2 => 1.0 / (s * s.sqrt()),
        4 => 1.0 / (s * s * s.sqrt()),
        _ => s.powf(-(D as f64 + 1.0) / 2.0),
    }
}

/// An ordered geodesic simplex in the Klein model with `V = D + 1` vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignedSimplex<const D: usize, const V: usize> {
    vertices: [KleinPoint<D>; V],
    orientation: i8,
}

pub type Simplex4 = SignedSimplex<4, 5>;
pub type Triangle2 = SignedSimplex<2, 3>;

/// Relative size of the vertex determinant below which a simplex is flat.
const FLAT_TOL: f64 = 1e-13;

impl<const D: usize, const V: usize> SignedSimplex<D, V> {
    pub fn new(vertices: [KleinPoint<D>; V]) -> Self {
        assert_eq!(V, D + 1, "a D-simplex has D + 1 vertices");
        let raw = vertices.map(|v| v.0);
        let det = edge_determinant(&raw);
        // Hadamard bound on the determinant from the edge lengths.
        let bound: f64 = (1..V)
            .map(|i| {
                raw[i]
                    .iter()
                    .zip(&raw[0])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .product();
        let orientation = if det.abs() <= FLAT_TOL * bound || bound == 0.0 {
            0
        } else if det > 0.0 {
            1
        } else {
            -1
        };
        Self {
            vertices,
            orientation,
        }
    }

    pub fn vertices(&self) -> &[KleinPoint<D>; V] {
        &self.vertices
    }

    /// Sign of `det[v1 - v0, ..., vD - v0]`; zero for flat simplices.
    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// The simplex with vertices `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut v = self.vertices;
        v.swap(i, j);
        Self {
            vertices: v,
            orientation: if i == j { self.orientation } else { -self.orientation },
        }
    }
}

/// A signed volume with its quadrature diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Volume {
    pub value: f64,
    pub err_est: f64,
    pub cells: usize,
}

impl Volume {
    fn zero() -> Self {
        Self {
            value: 0.0,
            err_est: 0.0,
            cells: 0,
        }
    }
}

/// Signed hyperbolic volume of a geodesic simplex with interior vertices.
///
/// The unsigned integral is computed with the vertices in a canonical
/// (lexicographic) order, so permuting the vertices changes the result by
/// the permutation sign exactly.
pub fn simplex_volume<const D: usize, const V: usize>(
    s: &SignedSimplex<D, V>,
    cfg: &QuadConfig,
) -> Result<Volume> {
    if s.vertices.iter().any(|v| !v.is_interior()) {
        return Err(Error::SingularInput);
    }
    if s.orientation == 0 {
        return Ok(Volume::zero());
    }
    let mut verts = s.vertices.map(|v| v.0);
    verts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let rule = SimplexRule::grundmann_moller(D, cfg.rule_index.max(1));
    let c = integrate(verts, &rule, &cfg.cubature(), density_raw::<D>).map_err(|e| match e {
        Error::QuadratureFailure {
            value,
            err_est,
            cells,
        } => Error::QuadratureFailure {
            value: value * s.orientation as f64,
            err_est,
            cells,
        },
        other => other,
    })?;
    Ok(Volume {
        value: s.orientation as f64 * c.value,
        err_est: c.err_est,
        cells: c.cells,
    })
}

/// Signed area of a geodesic triangle in the Klein disc.
pub fn triangle_area_h2(vertices: [KleinPoint2; 3], cfg: &QuadConfig) -> Result<Volume> {
    simplex_volume(&Triangle2::new(vertices), cfg)
}

/// Vertices of a Euclidean-regular `D`-simplex inscribed in the sphere of
/// radius `r` about the origin. By symmetry it is a regular hyperbolic
/// simplex; `r = 1` gives the ideal one.
pub fn regular_klein_simplex<const D: usize, const V: usize>(r: f64) -> [KleinPoint<D>; V] {
    assert_eq!(V, D + 1);
    // Rows of the Helmert matrix form an orthonormal basis of the plane
    // orthogonal to (1, ..., 1); vertex i has coordinates h_k[i].
    let mut out = [KleinPoint([0.0; D]); V];
    for k in 1..=D {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for (i, v) in out.iter_mut().enumerate() {
            v.0[k - 1] = match i.cmp(&k) {
                std::cmp::Ordering::Less => 1.0 / norm,
                std::cmp::Ordering::Equal => -(k as f64) / norm,
                std::cmp::Ordering::Greater => 0.0,
            };
        }
    }
    let scale = r / (D as f64 / (D as f64 + 1.0)).sqrt();
    for v in out.iter_mut() {
        v.0.iter_mut().for_each(|c| *c *= scale);
    }
    out
}

/// The regular 4-simplex of Klein circumradius `r`.
pub fn regular_simplex(r: f64) -> [KleinPoint4; 5] {
    regular_klein_simplex::<4, 5>(r)
}

/// The regular triangle of Klein circumradius `r`.
pub fn regular_triangle(r: f64) -> [KleinPoint2; 3] {
    regular_klein_simplex::<2, 3>(r)
}

/// Outcome of an ideal-limit extrapolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub value: f64,
    pub err_bound: f64,
    /// `(r_k, f(r_k))` samples in schedule order.
    pub samples: Vec<(f64, f64)>,
}

/// Limit of `family(r)` as `r -> 1`, from samples at `r_k = 1 - 2^-k`.
///
/// Near an ideal vertex the missing volume expands in half-integer powers
/// of `1 - r`. The leading power is estimated from the last three samples
/// and rounded to a half-integer; Richardson columns then eliminate it and
/// the next two half-integer powers. The reported value is the table entry
/// whose change from its predecessor in the same column is smallest, and
/// that change is the error bound.
pub fn extrapolate_ideal<F>(family: F, schedule: &[u32]) -> Result<Extrapolation>
where
    F: Fn(f64) -> Result<f64>,
{
    if schedule.len() < 2 {
        return Err(Error::InvalidInput("schedule needs at least two radii".into()));
    }
    if schedule.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::InvalidInput("schedule must be consecutive exponents".into()));
    }
    let samples = schedule
        .iter()
        .map(|&k| {
            let r = 1.0 - 2f64.powi(-(k as i32));
            family(r).map(|v| (r, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let vals: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let m = vals.len();

    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let diffs: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
    let tail_tol = 1e-6 * scale;
    let increasing = diffs.iter().all(|&d| d >= -tail_tol);
    let decreasing = diffs.iter().all(|&d| d <= tail_tol);
    if !(increasing || decreasing) {
        return Err(Error::ExtrapolationUnstable(format!(
            "samples are not monotone: differences {diffs:?}"
        )));
    }

    let mut best = (vals[m - 1], (vals[m - 1] - vals[m - 2]).abs());
    if best.1 == 0.0 || m < 3 {
        return Ok(Extrapolation {
            value: best.0,
            err_bound: best.1,
            samples,
        });
    }
    let (d1, d2) = (diffs[m - 3], diffs[m - 2]);
    let lead = if d1 != 0.0 && d2 != 0.0 && d1.signum() == d2.signum() {
        ((d1 / d2).log2() * 2.0).round().max(1.0) / 2.0
    } else {
        0.5
    };

    let mut table: Vec<Vec<f64>> = vec![vals];
    for j in 0..3.min(m - 1) {
        let prev = &table[j];
        let f = 2f64.powf(lead + 0.5 * j as f64) - 1.0;
        let col: Vec<f64> = (1..prev.len()).map(|i| prev[i] + (prev[i] - prev[i - 1]) / f).collect();
        table.push(col);
    }
    for col in &table {
        for i in 1..col.len() {
            let change = (col[i] - col[i - 1]).abs();
            if change < best.1 {
                best = (col[i], change);
            }
        }
    }
    Ok(Extrapolation {
        value: best.0,
        err_bound: best.1,
        samples,
    })
}
