//! Real quaternions `w + xi + yj + zk` over `f64`.
//!
//! Complex scalars are represented as quaternions with `y = z = 0`; that
//! subalgebra is closed under every operation here, so the complex
//! hyperbolic code reuses the same arithmetic.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for the "is real" / "is zero" predicates.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A quaternion `w + x i + y j + z k`. Serialized as `[w, x, y, z]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// The complex number `re + im i` embedded in the quaternions.
    pub const fn complex(re: f64, im: f64) -> Self {
        Self::new(re, im, 0.0, 0.0)
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Euclidean norm of the imaginary part.
    pub fn imag_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Multiplicative inverse `conj(q) / |q|^2`.
    pub fn inv(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::ZeroDivisor);
        }
        Ok(self.conj() / n2)
    }

    /// `q / |q|`, or an error for the zero quaternion.
    pub fn unit(self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroDivisor);
        }
        Ok(self / n)
    }

    /// True iff `max(|x|,|y|,|z|) <= tol * max(1, |q|)`.
    pub fn is_real(self, tol: f64) -> bool {
        let m = self.x.abs().max(self.y.abs()).max(self.z.abs());
        m <= tol * self.norm().max(1.0)
    }

    /// True iff the `j` and `k` parts vanish within `tol * max(1, |q|)`.
    pub fn is_complex(self, tol: f64) -> bool {
        self.y.abs().max(self.z.abs()) <= tol * self.norm().max(1.0)
    }

    pub fn is_zero(self, tol: f64) -> bool {
        self.norm() <= tol
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Componentwise distance `|a - b|`.
    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        a.dist(b) <= tol
    }

    #[test]
    fn basis_relations() {
        let m1 = Quaternion::real(-1.0);
        assert_eq!(I * I, m1);
        assert_eq!(J * J, m1);
        assert_eq!(K * K, m1);
        assert_eq!(I * J * K, m1);
        assert_eq!(I * J, K);
        assert_eq!(K * J, -I);
        assert_eq!(J * I, -K);
    }

    #[test]
    fn product_examples() {
        let a = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let b = Quaternion::new(1.0, -1.0, 0.0, 0.0);
        assert_eq!(a * b, Quaternion::real(2.0));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(J.conj(), -J);
        assert_eq!((I * J).conj(), -K);
        assert_eq!((I * J).conj(), J.conj() * I.conj());
        assert_eq!(Quaternion::real(3.0).conj(), Quaternion::real(3.0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(J.inv().unwrap(), -J);
        assert_eq!(Quaternion::real(2.0).inv().unwrap(), Quaternion::real(0.5));
        let q = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let qi = q.inv().unwrap();
        assert!(close(qi, Quaternion::new(0.5, -0.5, 0.0, 0.0), 1e-15));
        assert!(close(q * qi, Quaternion::ONE, 1e-15));
        assert!(close(qi * q, Quaternion::ONE, 1e-15));
        assert!(matches!(Quaternion::ZERO.inv(), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn real_predicate_is_relative() {
        let q = Quaternion::new(1e6, 1e-4, 0.0, 0.0);
        assert!(q.is_real(1e-9));
        assert!(!Quaternion::new(1.0, 1e-4, 0.0, 0.0).is_real(1e-9));
        assert!(Quaternion::complex(2.0, 3.0).is_complex(0.0));
    }

    #[test]
    fn complex_subalgebra_closed() {
        let a = Quaternion::complex(0.3, -1.2);
        let b = Quaternion::complex(-2.0, 0.7);
        for q in [a * b, a + b, a - b, a.conj(), a.inv().unwrap(), -b, b * 3.0] {
            assert_eq!(q.y, 0.0);
            assert_eq!(q.z, 0.0);
        }
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn norm_is_multiplicative(a in quat(), b in quat()) {
            let lhs = (a * b).norm();
            let rhs = a.norm() * b.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(f64::MIN_POSITIVE));
        }

        #[test]
        fn associative(a in quat(), b in quat(), c in quat()) {
            let scale = a.norm() * b.norm() * c.norm();
            prop_assert!(((a * b) * c).dist(a * (b * c)) <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn conj_is_anti_homomorphism(a in quat(), b in quat()) {
            let scale = a.norm() * b.norm();
            prop_assert!((a * b).conj().dist(b.conj() * a.conj()) <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn norm_sqr_is_q_conj_q(a in quat()) {
            let p = a * a.conj();
            prop_assert!(p.imag_norm() <= 1e-12 * a.norm_sqr().max(1e-300));
            prop_assert!((p.w - a.norm_sqr()).abs() <= 1e-12 * a.norm_sqr());
        }
    }
}
