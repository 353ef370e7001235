//! The indefinite Hermitian space `H^{n,1}` and the projective ball model of
//! quaternionic hyperbolic space.
//!
//! Vectors are columns of `n + 1` quaternions. Scalars act on the right, and
//! the form
//!
//! ```text
//! <z, w> = conj(w_1) z_1 + ... + conj(w_n) z_n - conj(w_{n+1}) z_{n+1}
//! ```
//!
//! is right-linear in its first slot (`<z l, w> = <z, w> l`) and
//! conjugate-linear on the left in its second (`<z, w m> = conj(m) <z, w>`).
//! A point of `H^n_H` is the class of a negative vector under right scaling;
//! it is stored with its last entry normalized to one, so the first `n`
//! entries are its disc coordinates.

use std::ops::{Add, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// A column vector in `H^{n,1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HVector(Vec<Quaternion>);

impl HVector {
    /// Builds a vector from its `n + 1` entries; requires `n >= 1`.
    pub fn new(entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: entries.len(),
            });
        }
        Ok(Self(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Quaternion::ZERO; n + 1])
    }

    /// The `k`-th standard basis vector (0-based) of `H^{n,1}`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = Quaternion::ONE;
        v
    }

    /// Ambient quaternionic dimension `n`.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.0
    }

    pub fn last(&self) -> Quaternion {
        self.0[self.0.len() - 1]
    }

    /// Right scalar action `(z l)_i = z_i l`.
    pub fn mul_right(&self, l: Quaternion) -> Self {
        Self(self.0.iter().map(|&q| q * l).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|&q| q * s).collect())
    }

    /// Euclidean norm of the entries (not the indefinite form).
    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_complex(&self, tol: f64) -> bool {
        self.0.iter().all(|q| q.is_complex(tol))
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.0.len() != other.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.0.len(),
                found: other.0.len(),
            });
        }
        Ok(())
    }
}

impl Add for &HVector {
    type Output = HVector;
    fn add(self, o: &HVector) -> HVector {
        debug_assert_eq!(self.0.len(), o.0.len());
        HVector(self.0.iter().zip(&o.0).map(|(&a, &b)| a + b).collect())
    }
}

impl Sub for &HVector {
    type Output = HVector;
    fn sub(self, o: &HVector) -> HVector {
        debug_assert_eq!(self.0.len(), o.0.len());
        HVector(self.0.iter().zip(&o.0).map(|(&a, &b)| a - b).collect())
    }
}

/// The Hermitian form of signature `(n, 1)`.
pub fn herm(z: &HVector, w: &HVector) -> Result<Quaternion> {
    z.check_dim(w)?;
    Ok(form(z, w))
}

/// Unchecked form evaluation for callers that already know the dimensions agree.
pub(crate) fn form(z: &HVector, w: &HVector) -> Quaternion {
    debug_assert_eq!(z.0.len(), w.0.len());
    let m = z.0.len() - 1;
    let mut acc = Quaternion::ZERO;
    for i in 0..m {
        acc += w.0[i].conj() * z.0[i];
    }
    acc - w.0[m].conj() * z.0[m]
}

/// `<z, z>`, which is always real.
pub(crate) fn form_sqr(z: &HVector) -> f64 {
    let m = z.0.len() - 1;
    let pos: f64 = z.0[..m].iter().map(|q| q.norm_sqr()).sum();
    pos - z.0[m].norm_sqr()
}

/// Sign class of a nonzero vector under the form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointClass {
    Negative,
    Null,
    Positive,
}

/// Classifies `z` by the sign of `<z, z>`; values with
/// `|<z,z>| <= tol * |z|^2` count as null.
pub fn classify(z: &HVector, tol: f64) -> Result<PointClass> {
    let e2 = z.euclid_norm().powi(2);
    if e2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let v = form_sqr(z);
    Ok(if v.abs() <= tol * e2 {
        PointClass::Null
    } else if v < 0.0 {
        PointClass::Negative
    } else {
        PointClass::Positive
    })
}

/// Tolerance used to classify lifts when a point is built.
const CLASSIFY_TOL: f64 = 1e-12;

/// A point of the closed projective model: the right-scaling class of a
/// nonzero vector.
///
/// Lifts with a nonzero last entry are normalized so that entry is exactly
/// one. Lifts whose last entry vanishes (possible only for null or positive
/// vectors) are scaled so their largest entry is one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    lift: HVector,
    class: PointClass,
    normalized: bool,
}

impl ProjPoint {
    /// The point with the given disc coordinates `q_i = z_i z_{n+1}^{-1}`.
    pub fn from_disc(coords: &[Quaternion]) -> Result<Self> {
        let mut entries = coords.to_vec();
        entries.push(Quaternion::ONE);
        normalize_lift(&HVector::new(entries)?)
    }

    /// The center `(0, ..., 0, 1)` of `H^n_H`.
    pub fn origin(n: usize) -> Self {
        Self {
            lift: HVector::basis(n, n),
            class: PointClass::Negative,
            normalized: true,
        }
    }

    pub fn lift(&self) -> &HVector {
        &self.lift
    }

    pub fn class(&self) -> PointClass {
        self.class
    }

    pub fn n(&self) -> usize {
        self.lift.n()
    }

    pub fn is_interior(&self) -> bool {
        self.class == PointClass::Negative
    }

    /// Disc coordinates, or `None` when the lift has a vanishing last entry.
    pub fn disc_coords(&self) -> Option<&[Quaternion]> {
        self.normalized.then(|| &self.lift.0[..self.lift.0.len() - 1])
    }

    /// Euclidean norm of the disc coordinates (infinite for points at infinity).
    pub fn disc_radius(&self) -> f64 {
        match self.disc_coords() {
            Some(c) => c.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt(),
            None => f64::INFINITY,
        }
    }

    /// Entrywise comparison of the normalized lifts.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.lift.0.len() == other.lift.0.len()
            && self.normalized == other.normalized
            && self
                .lift
                .0
                .iter()
                .zip(&other.lift.0)
                .all(|(a, b)| a.dist(*b) <= tol)
    }
}

/// Projects a lift to its normalized representative `(z_i z_{n+1}^{-1})`.
pub fn normalize_lift(z: &HVector) -> Result<ProjPoint> {
    let class = classify(z, CLASSIFY_TOL)?;
    let last = z.last();
    // A last entry this small relative to the vector means the class sits at
    // (or numerically indistinguishably from) the hyperplane z_{n+1} = 0.
    if last.norm() > 1e-300 && last.norm() > 1e-14 * z.euclid_norm() {
        let inv = last.inv()?;
        let mut lift = z.mul_right(inv);
        let m = lift.0.len() - 1;
        lift.0[m] = Quaternion::ONE;
        return Ok(ProjPoint {
            lift,
            class,
            normalized: true,
        });
    }
    if class == PointClass::Negative {
        return Err(Error::Internal(
            "negative vector with vanishing last entry".into(),
        ));
    }
    let pivot = z
        .0
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .ok_or(Error::ZeroVector)?;
    Ok(ProjPoint {
        lift: z.mul_right(pivot.inv()?),
        class,
        normalized: false,
    })
}

/// The Hermitian triple product `<u,v><v,w><w,u>`, with each factor taken
/// conjugate-linear in its first slot, i.e. `herm(v,u) herm(w,v) herm(u,w)`.
///
/// In this order right scaling of the lifts by `l0, l1, l2` sends the value
/// `t` to `|l1|^2 |l2|^2 conj(l0) t l0`: its real part and norm scale by the
/// positive real `|l0 l1 l2|^2` and its realness does not depend on the lifts.
pub fn triple_product(u: &HVector, v: &HVector, w: &HVector) -> Result<Quaternion> {
    u.check_dim(v)?;
    u.check_dim(w)?;
    Ok(form(v, u) * form(w, v) * form(u, w))
}

/// Relative size of the imaginary part of the triple product of three lifts.
pub fn triple_imag_ratio(u: &HVector, v: &HVector, w: &HVector) -> Result<f64> {
    let t = triple_product(u, v, w)?;
    let n = t.norm();
    Ok(if n == 0.0 { 0.0 } else { t.imag_norm() / n })
}

/// Whether three points lie in a common totally real subspace, decided by
/// realness of their triple product.
///
/// Coincident points are reported as totally real: the span of the three
/// lifts then degenerates to that of two points, which is always real after
/// rescaling.
pub fn is_totally_real_triple(u: &ProjPoint, v: &ProjPoint, w: &ProjPoint, tol: f64) -> bool {
    const COINCIDE: f64 = 1e-12;
    if u.approx_eq(v, COINCIDE) || v.approx_eq(w, COINCIDE) || w.approx_eq(u, COINCIDE) {
        return true;
    }
    match triple_imag_ratio(&u.lift, &v.lift, &w.lift) {
        Ok(r) => r <= tol,
        Err(_) => false,
    }
}

/// Rescales the second and third lifts on the right by unit quaternions so
/// that `<u, v l1>` and `<w l2, u>` are real.
///
/// When the triple product is real the remaining product `<v l1, w l2>` is
/// then real as well, which exhibits a totally real span.
pub fn realify_lifts(u: &HVector, v: &HVector, w: &HVector) -> Result<(HVector, HVector, HVector)> {
    u.check_dim(v)?;
    u.check_dim(w)?;
    // <u, v l> = conj(l) <u, v>, real for l = <u,v>/|<u,v>|.
    let l1 = form(u, v).unit()?;
    // <w l, u> = <w, u> l, real for l = conj(<w,u>)/|<w,u>|.
    let l2 = form(w, u).conj().unit()?;
    Ok((u.clone(), v.mul_right(l1), w.mul_right(l2)))
}

/// An element of `Sp(n, 1)` acting on `H^{n,1}` by left matrix multiplication.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    dim: usize,
    // Row-major (n+1) x (n+1).
    m: Vec<Quaternion>,
}

impl Isometry {
    pub fn identity(n: usize) -> Self {
        let dim = n + 1;
        let mut m = vec![Quaternion::ZERO; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Quaternion::ONE;
        }
        Self { dim, m }
    }

    /// Real hyperbolic boost of rapidity `t` in the `(e_k, e_{n+1})` plane.
    pub fn boost(n: usize, k: usize, t: f64) -> Self {
        let mut g = Self::identity(n);
        let d = g.dim;
        let (c, s) = (t.cosh(), t.sinh());
        g.m[k * d + k] = Quaternion::real(c);
        g.m[k * d + n] = Quaternion::real(s);
        g.m[n * d + k] = Quaternion::real(s);
        g.m[n * d + n] = Quaternion::real(c);
        g
    }

    /// Real rotation by `theta` in the `(e_i, e_j)` plane, `i, j < n`.
    pub fn rotation(n: usize, i: usize, j: usize, theta: f64) -> Self {
        let mut g = Self::identity(n);
        let d = g.dim;
        let (c, s) = (theta.cos(), theta.sin());
        g.m[i * d + i] = Quaternion::real(c);
        g.m[i * d + j] = Quaternion::real(-s);
        g.m[j * d + i] = Quaternion::real(s);
        g.m[j * d + j] = Quaternion::real(c);
        g
    }

    /// Diagonal matrix of unit quaternions.
    pub fn diagonal(units: &[Quaternion]) -> Result<Self> {
        let dim = units.len();
        let mut g = Self::identity(dim - 1);
        for (i, u) in units.iter().enumerate() {
            g.m[i * dim + i] = u.unit()?;
        }
        Ok(g)
    }

    pub fn compose(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut m = vec![Quaternion::ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = Quaternion::ZERO;
                for k in 0..d {
                    acc += self.m[i * d + k] * other.m[k * d + j];
                }
                m[i * d + j] = acc;
            }
        }
        Self { dim: d, m }
    }

    pub fn apply(&self, z: &HVector) -> HVector {
        let d = self.dim;
        HVector(
            (0..d)
                .map(|i| {
                    (0..d).fold(Quaternion::ZERO, |acc, k| acc + self.m[i * d + k] * z.0[k])
                })
                .collect(),
        )
    }

    pub fn apply_point(&self, p: &ProjPoint) -> Result<ProjPoint> {
        normalize_lift(&self.apply(&p.lift))
    }

    /// A random isometry built from diagonal unit quaternions, real
    /// rotations and boosts of rapidity at most `max_boost`.
    pub fn random<R: Rng + ?Sized>(n: usize, max_boost: f64, rng: &mut R) -> Self {
        let unit = |rng: &mut R| loop {
            let q = random_quaternion(rng);
            if let Ok(u) = q.unit() {
                break u;
            }
        };
        let d0: Vec<_> = (0..=n).map(|_| unit(rng)).collect();
        let mut g = Self::diagonal(&d0).expect("unit quaternions");
        for i in 0..n {
            for j in (i + 1)..n {
                let th = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                g = Self::rotation(n, i, j, th).compose(&g);
            }
            let t = rng.gen_range(-max_boost..=max_boost);
            g = Self::boost(n, i, t).compose(&g);
        }
        let d1: Vec<_> = (0..=n).map(|_| unit(rng)).collect();
        Self::diagonal(&d1).expect("unit quaternions").compose(&g)
    }
}

fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Samples the ball of radius `r_max` in `(R^c)^n` uniformly, where `c` is
/// the number of real components used per quaternion entry.
fn sample_ball<R: Rng + ?Sized>(n: usize, r_max: f64, components: usize, rng: &mut R) -> ProjPoint {
    if r_max <= 0.0 {
        return ProjPoint::origin(n);
    }
    let mut coords = vec![Quaternion::ZERO; n];
    let mut norm2 = 0.0;
    while norm2 == 0.0 {
        norm2 = 0.0;
        for q in coords.iter_mut() {
            let mut c = [0.0; 4];
            for v in c.iter_mut().take(components) {
                *v = rng.sample(StandardNormal);
                norm2 += *v * *v;
            }
            *q = Quaternion::from(c);
        }
    }
    let dim = (components * n) as f64;
    let u: f64 = rng.gen();
    let radius = r_max.min(1.0 - 1e-15) * u.powf(1.0 / dim);
    let s = radius / norm2.sqrt();
    let coords: Vec<_> = coords.into_iter().map(|q| q * s).collect();
    ProjPoint::from_disc(&coords).expect("disc sample is interior")
}

/// Uniform random interior point with disc radius at most `r_max`.
pub fn random_point<R: Rng + ?Sized>(n: usize, r_max: f64, rng: &mut R) -> ProjPoint {
    sample_ball(n, r_max, 4, rng)
}

/// Random point of complex hyperbolic space `H^n_C` inside `H^n_H`.
pub fn random_complex_point<R: Rng + ?Sized>(n: usize, r_max: f64, rng: &mut R) -> ProjPoint {
    sample_ball(n, r_max, 2, rng)
}

/// Random point of the real hyperbolic space `H^n_R` inside `H^n_H`.
pub fn random_real_point<R: Rng + ?Sized>(n: usize, r_max: f64, rng: &mut R) -> ProjPoint {
    sample_ball(n, r_max, 1, rng)
}

/// [`random_point`] driven by a fixed seed.
pub fn random_point_seeded(n: usize, r_max: f64, seed: u64) -> ProjPoint {
    random_point(n, r_max, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Three points with a real triple product: real points moved by a random
/// isometry, with lifts rescaled by random unit quaternions.
pub fn make_totally_real_triple<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> (ProjPoint, ProjPoint, ProjPoint) {
    let g = Isometry::random(n, 1.0, rng);
    let pick = |rng: &mut R| {
        let p = random_real_point(n, 0.95, rng);
        let l = random_quaternion(rng).unit().unwrap_or(Quaternion::ONE);
        normalize_lift(&g.apply(&p.lift).mul_right(l)).expect("isometries preserve the interior")
    };
    let a = pick(rng);
    let b = pick(rng);
    let c = pick(rng);
    (a, b, c)
}

/// [`make_totally_real_triple`] driven by a fixed seed.
pub fn make_totally_real_triple_seeded(n: usize, seed: u64) -> (ProjPoint, ProjPoint, ProjPoint) {
    make_totally_real_triple(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Point file: `{ "n": int, "points": [[[w,x,y,z], ...], ...] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointFile {
    pub n: usize,
    pub points: Vec<Vec<Quaternion>>,
}

impl PointFile {
    pub fn from_points(points: &[ProjPoint]) -> Result<Self> {
        let n = points
            .first()
            .map(ProjPoint::n)
            .ok_or_else(|| Error::InvalidInput("empty point list".into()))?;
        Ok(Self {
            n,
            points: points.iter().map(|p| p.lift().entries().to_vec()).collect(),
        })
    }

    /// Parses every entry as a lift and normalizes it.
    pub fn to_points(&self) -> Result<Vec<ProjPoint>> {
        self.points
            .iter()
            .map(|entries| {
                if entries.len() != self.n + 1 {
                    return Err(Error::DimensionMismatch {
                        expected: self.n + 1,
                        found: entries.len(),
                    });
                }
                normalize_lift(&HVector::new(entries.clone())?)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::Quaternion as Q;
    use proptest::prelude::*;

    fn hv(v: &[Q]) -> HVector {
        HVector::new(v.to_vec()).unwrap()
    }

    fn half() -> Q {
        Q::real(0.5)
    }

    #[test]
    fn herm_examples() {
        let e = HVector::basis(2, 2);
        assert_eq!(herm(&e, &e).unwrap(), Q::real(-1.0));

        let z = hv(&[Q::ZERO, Q::ZERO, Q::ONE]);
        let w = hv(&[Q::ZERO, half(), Q::ONE]);
        assert_eq!(herm(&z, &w).unwrap(), Q::real(-1.0));

        // conj(j/2) (i/2) = (-j/2)(i/2) = k/4
        let z = hv(&[Q::I * 0.5, Q::ZERO, Q::ONE]);
        let w = hv(&[Q::J * 0.5, Q::ZERO, Q::ONE]);
        assert_eq!(herm(&z, &w).unwrap(), Q::new(-1.0, 0.0, 0.0, 0.25));
    }

    #[test]
    fn herm_dimension_mismatch() {
        let a = HVector::basis(2, 0);
        let b = HVector::basis(3, 0);
        assert!(matches!(
            herm(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn classify_examples() {
        let n = 3;
        assert_eq!(classify(&HVector::basis(n, n), 1e-9).unwrap(), PointClass::Negative);
        assert_eq!(classify(&HVector::basis(n, 0), 1e-9).unwrap(), PointClass::Positive);
        let null = &HVector::basis(n, 0) + &HVector::basis(n, n);
        assert_eq!(classify(&null, 1e-9).unwrap(), PointClass::Null);
        assert_eq!(classify(&HVector::zeros(n), 1e-9), Err(Error::ZeroVector));
    }

    #[test]
    fn normalize_examples() {
        // k j^{-1} = k (-j) = i
        let z = hv(&[Q::K, Q::ZERO, Q::J]);
        let p = normalize_lift(&z).unwrap();
        assert_eq!(p.disc_coords().unwrap(), &[Q::I, Q::ZERO][..]);
        assert_eq!(p.class(), PointClass::Null);

        let q = hv(&[Q::new(0.1, 0.2, 0.0, -0.1), Q::new(0.0, 0.0, 0.3, 0.0), Q::ONE]);
        assert_eq!(normalize_lift(&q).unwrap().lift(), &q);

        let scaled = q.mul_right(Q::new(1.0, 0.0, 1.0, 0.0));
        assert!(normalize_lift(&scaled)
            .unwrap()
            .approx_eq(&normalize_lift(&q).unwrap(), 1e-15));
    }

    #[test]
    fn null_lift_at_infinity_is_kept() {
        // (1, i, 0): <z,z> = 1 + 1 - 0 > 0 is positive; (1, 0, 0) with n = 1 is positive too.
        let z = hv(&[Q::ONE, Q::ZERO]);
        let p = normalize_lift(&z).unwrap();
        assert_eq!(p.class(), PointClass::Positive);
        assert!(p.disc_coords().is_none());
        assert!(p.disc_radius().is_infinite());
    }

    #[test]
    fn triple_product_examples() {
        // Lemma configuration with z1 = w1 = 0: the triple ((0,0,1), (0,1/2,1), (0,0,1)).
        let z = hv(&[Q::ZERO, Q::ZERO, Q::ONE]);
        let w = hv(&[Q::ZERO, half(), Q::ONE]);
        let pw = hv(&[Q::ZERO, Q::ZERO, Q::ONE]);
        assert_eq!(triple_product(&z, &w, &pw).unwrap(), Q::real(-1.0));

        // z1 = i/2, w1 = j/2, w2 arbitrary: closed form (|w1|^2 - 1)|z1 conj(w1) - 1|^2.
        let z1 = Q::I * 0.5;
        let w1 = Q::J * 0.5;
        let w2 = Q::new(0.1, -0.3, 0.2, 0.4);
        let z = hv(&[z1, Q::ZERO, Q::ONE]);
        let w = hv(&[w1, w2, Q::ONE]);
        let pw = hv(&[w1, Q::ZERO, Q::ONE]);
        let closed = (w1.norm_sqr() - 1.0) * (z1 * w1.conj() - Q::ONE).norm_sqr();
        assert!((closed - (-51.0 / 64.0)).abs() < 1e-15);
        let t = triple_product(&z, &w, &pw).unwrap();
        assert!(t.dist(Q::real(-51.0 / 64.0)) < 1e-15);

        let t2 = triple_product(&z.scale(2.0), &w, &pw).unwrap();
        assert!(t2.dist(t * 4.0) < 1e-15);
    }

    #[test]
    fn totally_real_examples() {
        let a = ProjPoint::from_disc(&[Q::real(0.1), Q::real(-0.3)]).unwrap();
        let b = ProjPoint::from_disc(&[Q::real(0.5), Q::real(0.2)]).unwrap();
        let c = ProjPoint::from_disc(&[Q::real(-0.4), Q::real(0.0)]).unwrap();
        assert!(is_totally_real_triple(&a, &b, &c, 1e-9));

        let o = ProjPoint::origin(2);
        let p = ProjPoint::from_disc(&[Q::I * 0.5, Q::ZERO]).unwrap();
        let q = ProjPoint::from_disc(&[Q::ZERO, Q::J * 0.5]).unwrap();
        // <o,p> = -1, <p,q> = -1, <q,o> = -1: the chain is real, so this triple is
        // totally real even though the coordinates are not.
        assert!(is_totally_real_triple(&o, &p, &q, 1e-9));

        let p = ProjPoint::from_disc(&[Q::I * 0.5, Q::real(0.3)]).unwrap();
        let q = ProjPoint::from_disc(&[Q::real(0.2), Q::J * 0.5]).unwrap();
        let t = triple_product(o.lift(), p.lift(), q.lift()).unwrap();
        // Brute-force chain: <p,q> = conj(q1) p1 + conj(q2) p2 - 1 = 0.1 i - 0.15 j - 1.
        let pq = herm(p.lift(), q.lift()).unwrap();
        assert!(pq.dist(Q::new(-1.0, 0.1, -0.15, 0.0)) < 1e-15);
        assert!(t.imag_norm() > 0.1);
        assert!(!is_totally_real_triple(&o, &p, &q, 1e-9));

        // Coincident points are degenerate and count as totally real.
        assert!(is_totally_real_triple(&p, &p, &q, 1e-9));
    }

    #[test]
    fn realify_collinear_real_points() {
        let a = hv(&[Q::real(0.1), Q::ONE]);
        let b = hv(&[Q::real(0.4), Q::ONE]);
        let c = hv(&[Q::real(-0.2), Q::ONE]);
        let (ra, rb, rc) = realify_lifts(&a, &b, &c).unwrap();
        assert_eq!(ra, a);
        // Real negative products are rotated to positive ones: lifts change by -1 only.
        assert_eq!(rb, b.scale(-1.0));
        assert_eq!(rc, c.scale(-1.0));
    }

    #[test]
    fn constructed_triples_are_totally_real() {
        for seed in 0..2000u64 {
            for n in 1..=3 {
                let (a, b, c) = make_totally_real_triple_seeded(n, seed);
                assert!(is_totally_real_triple(&a, &b, &c, 1e-9), "seed {seed} n {n}");
                let (ra, rb, rc) = realify_lifts(a.lift(), b.lift(), c.lift()).unwrap();
                assert!(herm(&ra, &rb).unwrap().is_real(1e-9));
                assert!(herm(&rc, &ra).unwrap().is_real(1e-9));
                assert!(herm(&rb, &rc).unwrap().is_real(1e-9));
            }
        }
    }

    #[test]
    fn random_point_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(random_point(3, 0.0, &mut rng), ProjPoint::origin(3));
        for _ in 0..1000 {
            let p = random_point(2, 0.9, &mut rng);
            assert_eq!(p.class(), PointClass::Negative);
            assert!(p.disc_radius() <= 0.9);
        }
        assert_eq!(random_point_seeded(2, 0.9, 42), random_point_seeded(2, 0.9, 42));
        assert_ne!(random_point_seeded(2, 0.9, 42), random_point_seeded(2, 0.9, 43));
        let c = random_complex_point(3, 0.9, &mut rng);
        assert!(c.lift().is_complex(0.0));
    }

    #[test]
    fn isometries_preserve_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = Isometry::random(3, 1.5, &mut rng);
            let a = random_point(3, 0.9, &mut rng);
            let b = random_point(3, 0.9, &mut rng);
            let lhs = herm(&g.apply(a.lift()), &g.apply(b.lift())).unwrap();
            let rhs = herm(a.lift(), b.lift()).unwrap();
            assert!(lhs.dist(rhs) <= 1e-10 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn point_file_round_trip() {
        let pts: Vec<_> = (0..3).map(|s| random_point_seeded(2, 0.8, s)).collect();
        let file = PointFile::from_points(&pts).unwrap();
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.starts_with("{\"n\":2,\"points\":[[["));
        let back: PointFile = serde_json::from_str(&json).unwrap();
        let pts2 = back.to_points().unwrap();
        for (a, b) in pts.iter().zip(&pts2) {
            assert!(a.approx_eq(b, 1e-15));
        }
        let bad = PointFile {
            n: 2,
            points: vec![vec![Q::ONE; 2]],
        };
        assert!(bad.to_points().is_err());
    }

    fn quat() -> impl Strategy<Value = Q> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(Q::from)
    }

    fn hvec(n: usize) -> impl Strategy<Value = HVector> {
        prop::collection::vec(quat(), n + 1).prop_map(|v| HVector::new(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn sesquilinear(z in hvec(3), w in hvec(3), l in quat(), m in quat()) {
            let s = z.euclid_norm() * w.euclid_norm() * (1.0 + l.norm()) * (1.0 + m.norm());
            let zw = herm(&z, &w).unwrap();
            prop_assert!(herm(&z.mul_right(l), &w).unwrap().dist(zw * l) <= 1e-12 * s);
            prop_assert!(herm(&z, &w.mul_right(m)).unwrap().dist(m.conj() * zw) <= 1e-12 * s);
            prop_assert!(herm(&w, &z).unwrap().dist(zw.conj()) <= 1e-12 * s);
            let zz = herm(&z, &z).unwrap();
            prop_assert!(zz.imag_norm() <= 1e-12 * z.euclid_norm().powi(2));
        }

        #[test]
        fn triple_product_scaling(u in hvec(2), v in hvec(2), w in hvec(2),
                                  l0 in quat(), l1 in quat(), l2 in quat()) {
            let t = triple_product(&u, &v, &w).unwrap();
            let ts = triple_product(&u.mul_right(l0), &v.mul_right(l1), &w.mul_right(l2)).unwrap();
            let f = l0.norm_sqr() * l1.norm_sqr() * l2.norm_sqr();
            let scale = (u.euclid_norm() * v.euclid_norm() * w.euclid_norm()).powi(2) * f;
            let tol = 1e-10 * scale.max(1e-300);
            let expected = l0.conj() * t * l0 * (l1.norm_sqr() * l2.norm_sqr());
            prop_assert!(ts.dist(expected) <= tol);
            prop_assert!((ts.w - f * t.w).abs() <= tol);
            prop_assert!((ts.norm() - f * t.norm()).abs() <= tol);
            // Real scalings act exactly by the product of squared norms.
            let (r0, r1) = (Q::real(l0.w), Q::real(l1.w));
            let tr = triple_product(&u.mul_right(r0), &v.mul_right(r1), &w.mul_right(l2)).unwrap();
            let fr = r0.norm_sqr() * r1.norm_sqr() * l2.norm_sqr();
            prop_assert!(tr.dist(t * fr) <= tol.max(1e-10 * fr * scale / f.max(1e-300)));
        }

        #[test]
        fn classification_is_scale_invariant(z in hvec(2), l in quat()) {
            prop_assume!(l.norm() > 1e-3);
            let a = classify(&z, 1e-9);
            let b = classify(&z.mul_right(l), 1e-9);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn totally_real_verdict_is_lift_independent(seed in 0u64..10_000, l in quat()) {
            prop_assume!(l.norm() > 1e-2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_point(2, 0.9, &mut rng);
            let b = random_point(2, 0.9, &mut rng);
            let c = random_point(2, 0.9, &mut rng);
            let r1 = triple_imag_ratio(a.lift(), b.lift(), c.lift()).unwrap();
            let r2 = triple_imag_ratio(&a.lift().mul_right(l), b.lift(), c.lift()).unwrap();
            prop_assert!((r1 - r2).abs() <= 1e-10);
        }
    }
}
