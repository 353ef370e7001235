//! Quaternionic and complex lines, orthogonal projection onto them, the
//! five-point reduction, and the hyperbolic distance.
//!
//! A line is the projectivization of a rank-two right submodule meeting the
//! negative cone. It is stored through a basis `(e-, e+)` that is orthonormal
//! for the form: `<e-,e-> = -1`, `<e+,e+> = +1`, `<e+,e-> = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pvspace::{classify, form, form_sqr, normalize_lift, HVector, PointClass, ProjPoint};
use crate::quat::Quaternion;

/// Condition number above which the 2x2 Gram system is rejected.
pub const GRAM_CONDITION_LIMIT: f64 = 1e8;

/// Points this close to a line (relative residual) are left unprojected.
const ON_LINE_TOL: f64 = 1e-13;

/// Points closer than this (entrywise, normalized lifts) are coincident.
const COINCIDE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalarField {
    Quaternionic,
    Complex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubLine {
    e_minus: HVector,
    e_plus: HVector,
    field: ScalarField,
    gram: [[Quaternion; 2]; 2],
    gram_residual: f64,
}

impl SubLine {
    pub fn e_minus(&self) -> &HVector {
        &self.e_minus
    }

    pub fn e_plus(&self) -> &HVector {
        &self.e_plus
    }

    pub fn field(&self) -> ScalarField {
        self.field
    }

    pub fn n(&self) -> usize {
        self.e_minus.n()
    }

    /// Largest deviation of the basis Gram matrix from `diag(-1, 1)` and of
    /// the spanning points from the span.
    pub fn gram_residual(&self) -> f64 {
        self.gram_residual
    }

    /// Coefficients `(a, b)` of the orthogonal projection `e- a + e+ b` of a lift.
    pub fn coefficients(&self, z: &HVector) -> Result<[Quaternion; 2]> {
        if z.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n() + 1,
                found: z.n() + 1,
            });
        }
        let rhs = [form(z, &self.e_minus), form(z, &self.e_plus)];
        solve_gram2(self.gram, rhs)
    }

    fn combine(&self, c: [Quaternion; 2]) -> HVector {
        &self.e_minus.mul_right(c[0]) + &self.e_plus.mul_right(c[1])
    }

    /// Lift of the orthogonal projection of `z` onto the span.
    pub fn project_lift(&self, z: &HVector) -> Result<HVector> {
        Ok(self.combine(self.coefficients(z)?))
    }

    /// Relative Euclidean distance from a lift to its projection; zero for
    /// points of the line.
    pub fn residual(&self, p: &ProjPoint) -> Result<f64> {
        let z = p.lift();
        let d = z - &self.project_lift(z)?;
        Ok(d.euclid_norm() / z.euclid_norm())
    }

    /// Poincare ball coordinates of a point of the line.
    ///
    /// Writing the projection as `(e+ u + e-) a`, the form restricted to the
    /// line is the standard form of `H^{1,1}` in the coordinate `u`, so `u`
    /// lies in the unit ball of `H = R^4` (of `C = R^2` for complex lines).
    pub fn ball_coords(&self, p: &ProjPoint) -> Result<Quaternion> {
        let [a, b] = self.coefficients(p.lift())?;
        Ok(b * a.inv()?)
    }

    /// The point of the line with ball coordinate `u`; inverse of
    /// [`SubLine::ball_coords`].
    pub fn point_at(&self, u: Quaternion) -> Result<ProjPoint> {
        if u.norm_sqr() >= 1.0 {
            return Err(Error::InvalidInput(format!("ball coordinate {u:?} is not interior")));
        }
        if self.field == ScalarField::Complex && !u.is_complex(0.0) {
            return Err(Error::InvalidInput("complex line needs a complex coordinate".into()));
        }
        normalize_lift(&self.combine([Quaternion::ONE, u]))
    }
}

/// Solves the 2x2 quaternionic system `sum_k g[j][k] c_k = r_j` by
/// elimination with partial pivoting; matrix entries act on the left.
pub fn solve_gram2(g: [[Quaternion; 2]; 2], r: [Quaternion; 2]) -> Result<[Quaternion; 2]> {
    let (g, r) = if g[0][0].norm() >= g[1][0].norm() {
        (g, r)
    } else {
        ([g[1], g[0]], [r[1], r[0]])
    };
    let p = g[0][0].inv().map_err(|_| Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let m = g[1][0] * p;
    let s = g[1][1] - m * g[0][1];
    let scale = g.iter().flatten().map(|q| q.norm()).fold(0.0, f64::max);
    if s.norm() <= scale * f64::EPSILON {
        return Err(Error::IllConditioned {
            condition: f64::INFINITY,
        });
    }
    let c1 = s.inv()? * (r[1] - m * r[0]);
    let c0 = p * (r[0] - g[0][1] * c1);
    Ok([c0, c1])
}

/// Condition number of the Hermitian matrix `[[a, conj(c)], [c, b]]` with
/// real `a`, `b`.
fn hermitian2_condition(a: f64, b: f64, c: Quaternion) -> f64 {
    let mean = 0.5 * (a + b);
    let rad = (0.25 * (a - b) * (a - b) + c.norm_sqr()).sqrt();
    let (l1, l2) = (mean + rad, mean - rad);
    let (big, small) = (l1.abs().max(l2.abs()), l1.abs().min(l2.abs()));
    if small == 0.0 {
        f64::INFINITY
    } else {
        big / small
    }
}

/// Euclidean product `sum conj(w_i) z_i`, with the same linearity as the form.
fn euclid(z: &HVector, w: &HVector) -> Quaternion {
    z.entries()
        .iter()
        .zip(w.entries())
        .fold(Quaternion::ZERO, |acc, (a, b)| acc + b.conj() * *a)
}

/// Eigenvector `(c0, c1)` of the Hermitian matrix `[[a, b], [conj(b), d]]`
/// for the real eigenvalue `l`, from the better conditioned row.
fn hermitian2_eigvec(a: f64, b: Quaternion, d: f64, l: f64) -> [Quaternion; 2] {
    if (d - l).abs() >= (a - l).abs() {
        [Quaternion::ONE, b.conj() * (-1.0 / (d - l))]
    } else {
        [b * (-1.0 / (a - l)), Quaternion::ONE]
    }
}

/// The line spanned by two distinct interior points.
///
/// The span is first given a Euclidean-orthonormal basis; diagonalizing the
/// form restricted to it yields `e-` and `e+`. Working from that basis keeps
/// the construction accurate when both points are close to the boundary.
pub fn line_through(p: &ProjPoint, q: &ProjPoint, field: ScalarField) -> Result<SubLine> {
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n() + 1,
            found: q.n() + 1,
        });
    }
    if !p.is_interior() || !q.is_interior() {
        return Err(Error::InvalidInput(
            "lines are spanned by interior points".into(),
        ));
    }
    if field == ScalarField::Complex && !(p.lift().is_complex(1e-12) && q.lift().is_complex(1e-12)) {
        return Err(Error::InvalidInput(
            "complex line through points with j or k components".into(),
        ));
    }
    if p.approx_eq(q, COINCIDE_TOL) {
        return Err(Error::DegenerateLine);
    }
    let (pl, ql) = (p.lift(), q.lift());
    let (a, b, c) = (form_sqr(pl), form_sqr(ql), form(pl, ql));
    let condition = hermitian2_condition(a, b, c);
    if condition > GRAM_CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition });
    }

    let b0 = pl.scale(1.0 / pl.euclid_norm());
    let u = ql.scale(1.0 / ql.euclid_norm());
    let f = &u - &b0.mul_right(euclid(&u, &b0));
    let fnorm = f.euclid_norm();
    if fnorm <= 1e-14 {
        return Err(Error::DegenerateLine);
    }
    let b1 = f.scale(1.0 / fnorm);
    // Restricted form c* G c with G = [[<b0,b0>, <b1,b0>], [<b0,b1>, <b1,b1>]].
    let (g00, g01, g11) = (form_sqr(&b0), form(&b1, &b0), form_sqr(&b1));
    let mean = 0.5 * (g00 + g11);
    let rad = (0.25 * (g00 - g11) * (g00 - g11) + g01.norm_sqr()).sqrt();
    let (l_minus, l_plus) = (mean - rad, mean + rad);
    if l_minus >= 0.0 || l_plus <= 0.0 {
        return Err(Error::IllConditioned { condition });
    }
    let vec_of = |l: f64| {
        let [c0, c1] = hermitian2_eigvec(g00, g01, g11, l);
        &b0.mul_right(c0) + &b1.mul_right(c1)
    };
    let (vm, vp) = (vec_of(l_minus), vec_of(l_plus));
    let e_minus = vm.scale(1.0 / (-form_sqr(&vm)).sqrt());
    let e_plus = vp.scale(1.0 / form_sqr(&vp).sqrt());
    let gram = [
        [form(&e_minus, &e_minus), form(&e_plus, &e_minus)],
        [form(&e_minus, &e_plus), form(&e_plus, &e_plus)],
    ];
    let mut line = SubLine {
        e_minus,
        e_plus,
        field,
        gram,
        gram_residual: 0.0,
    };
    let basis_dev = [
        (gram[0][0] - Quaternion::real(-1.0)).norm(),
        gram[0][1].norm(),
        gram[1][0].norm(),
        (gram[1][1] - Quaternion::ONE).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    line.gram_residual = basis_dev.max(line.residual(p)?).max(line.residual(q)?);
    Ok(line)
}

/// Orthogonal projection of an interior point onto a line.
pub fn project_to_line(z: &ProjPoint, line: &SubLine) -> Result<ProjPoint> {
    let v = line.project_lift(z.lift())?;
    match classify(&v, 1e-12)? {
        PointClass::Negative => normalize_lift(&v),
        other => Err(Error::Internal(format!(
            "projection onto a line produced a {other:?} vector"
        ))),
    }
}

/// For `n = 2`: a positive vector `c` with `L = P(c^perp)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolarVector {
    c: HVector,
}

impl PolarVector {
    pub fn vector(&self) -> &HVector {
        &self.c
    }

    /// `z -> P(z - c <z,c>/<c,c>)`. The scalar multiplies `c` on the right,
    /// which is the order that makes the difference orthogonal to `c`.
    pub fn project(&self, z: &ProjPoint) -> Result<ProjPoint> {
        let zl = z.lift();
        if zl.n() != self.c.n() {
            return Err(Error::DimensionMismatch {
                expected: self.c.n() + 1,
                found: zl.n() + 1,
            });
        }
        let s = form(zl, &self.c) / form_sqr(&self.c);
        normalize_lift(&(zl - &self.c.mul_right(s)))
    }
}

/// The polar vector of a quaternionic line in `H^2_H`, scaled to `<c,c> = 1`.
pub fn polar_vector(line: &SubLine) -> Result<PolarVector> {
    if line.n() != 2 || line.field() != ScalarField::Quaternionic {
        return Err(Error::Unsupported(
            "polar vectors exist for quaternionic lines in H^2_H only".into(),
        ));
    }
    let best = (0..=2)
        .map(|k| {
            let b = HVector::basis(2, k);
            let c = &b - &line.project_lift(&b)?;
            Ok((form_sqr(&c), c))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .ok_or_else(|| Error::Internal("no candidate polar vector".into()))?;
    let (cc, c) = best;
    if cc <= 0.0 {
        return Err(Error::Internal("orthogonal complement is not positive".into()));
    }
    Ok(PolarVector {
        c: c.scale(1.0 / cc.sqrt()),
    })
}

/// A five-tuple moved onto the line through two of its points.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub points: Vec<ProjPoint>,
    pub line: SubLine,
    /// Largest membership residual of the reduced points.
    pub residual: f64,
}

/// Keeps points `i` and `j` and replaces every other point by its
/// projection onto the line through them.
pub fn reduce_onto(t: &[ProjPoint], i: usize, j: usize) -> Result<Reduction> {
    if i == j || i >= t.len() || j >= t.len() {
        return Err(Error::InvalidInput(format!("bad line pair ({i}, {j})")));
    }
    let line = line_through(&t[i], &t[j], ScalarField::Quaternionic)?;
    let points = t
        .iter()
        .enumerate()
        .map(|(k, p)| {
            if k == i || k == j || line.residual(p)? <= ON_LINE_TOL {
                Ok(p.clone())
            } else {
                project_to_line(p, &line)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let residual = points
        .iter()
        .map(|p| line.residual(p))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Reduction {
        points,
        line,
        residual,
    })
}

/// Projects the last three points of a five-tuple onto the line through the
/// first two.
pub fn reduce_tuple(t: &[ProjPoint; 5]) -> Result<Reduction> {
    reduce_onto(t, 0, 1)
}

/// `cosh` of the distance between two interior points.
///
/// The metric is normalized so quaternionic lines have curvature -1, which
/// gives `cosh(d/2) = |<p,q>| / sqrt(<p,p><q,q>)`.
pub fn cosh_dist(p: &ProjPoint, q: &ProjPoint) -> Result<f64> {
    if !p.is_interior() || !q.is_interior() {
        return Err(Error::InfiniteDistance);
    }
    if p.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n() + 1,
            found: q.n() + 1,
        });
    }
    let (pl, ql) = (p.lift(), q.lift());
    let ratio = form(pl, ql).norm_sqr() / (form_sqr(pl) * form_sqr(ql));
    Ok((2.0 * ratio - 1.0).max(1.0))
}

/// Hyperbolic distance between two interior points.
pub fn dist(p: &ProjPoint, q: &ProjPoint) -> Result<f64> {
    if !p.is_interior() || !q.is_interior() {
        return Err(Error::InfiniteDistance);
    }
    let (pl, ql) = (p.lift(), q.lift());
    let ratio = form(pl, ql).norm_sqr() / (form_sqr(pl) * form_sqr(ql));
    Ok(2.0 * ratio.max(1.0).sqrt().acosh())
}
