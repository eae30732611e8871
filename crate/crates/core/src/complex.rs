//! Complex scalars and the two 3-vector types every other module is built on.
//!
//! `ComplexVec3` carries φ and its antiderivative Φ; `RealVec3` carries the
//! surface point and its partial derivatives. The complex "square" here is
//! the bilinear `v·v`, never the Hermitian norm.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex scalar at double precision.
pub type ComplexScalar = Complex64;

/// A point or vector in R³.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct RealVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl RealVec3 {
    pub const ZERO: RealVec3 = RealVec3::new(0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn dot(self, other: RealVec3) -> f64 {
        dot_real(self, other)
    }

    pub fn cross(self, other: RealVec3) -> RealVec3 {
        cross(self, other)
    }

    pub fn norm_sq(self) -> f64 {
        norm_sq(self)
    }

    pub fn norm(self) -> f64 {
        norm_sq(self).sqrt()
    }

    /// Largest absolute component; NaN if any component is NaN.
    pub fn max_abs(self) -> f64 {
        max_nan([self.x1.abs(), self.x2.abs(), self.x3.abs()])
    }

    pub fn scale(self, s: f64) -> RealVec3 {
        RealVec3::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }
}

impl From<[f64; 3]> for RealVec3 {
    fn from(a: [f64; 3]) -> Self {
        RealVec3::new(a[0], a[1], a[2])
    }
}

impl From<RealVec3> for [f64; 3] {
    fn from(v: RealVec3) -> Self {
        v.to_array()
    }
}

impl Add for RealVec3 {
    type Output = RealVec3;
    fn add(self, rhs: RealVec3) -> RealVec3 {
        RealVec3::new(self.x1 + rhs.x1, self.x2 + rhs.x2, self.x3 + rhs.x3)
    }
}

impl Sub for RealVec3 {
    type Output = RealVec3;
    fn sub(self, rhs: RealVec3) -> RealVec3 {
        RealVec3::new(self.x1 - rhs.x1, self.x2 - rhs.x2, self.x3 - rhs.x3)
    }
}

impl Neg for RealVec3 {
    type Output = RealVec3;
    fn neg(self) -> RealVec3 {
        RealVec3::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<RealVec3> for f64 {
    type Output = RealVec3;
    fn mul(self, rhs: RealVec3) -> RealVec3 {
        rhs.scale(self)
    }
}

impl fmt::Display for RealVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

/// A triple of complex numbers in coordinate order (x₁, x₂, x₃).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexVec3 {
    pub c1: ComplexScalar,
    pub c2: ComplexScalar,
    pub c3: ComplexScalar,
}

impl ComplexVec3 {
    pub const ZERO: ComplexVec3 = ComplexVec3 {
        c1: Complex64::new(0.0, 0.0),
        c2: Complex64::new(0.0, 0.0),
        c3: Complex64::new(0.0, 0.0),
    };

    pub const fn new(c1: ComplexScalar, c2: ComplexScalar, c3: ComplexScalar) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn from_array(c: [ComplexScalar; 3]) -> Self {
        Self::new(c[0], c[1], c[2])
    }

    pub fn to_array(self) -> [ComplexScalar; 3] {
        [self.c1, self.c2, self.c3]
    }

    /// `v₁² + v₂² + v₃²`, with no conjugation.
    pub fn square(self) -> ComplexScalar {
        cvec_square(self)
    }

    pub fn re(self) -> RealVec3 {
        re_vec(self)
    }

    pub fn im(self) -> RealVec3 {
        im_vec(self)
    }

    pub fn scale(self, s: ComplexScalar) -> ComplexVec3 {
        ComplexVec3::new(self.c1 * s, self.c2 * s, self.c3 * s)
    }

    /// Sum of squared moduli. Only used as a magnitude for residual scaling.
    pub fn modulus_sq(self) -> f64 {
        self.c1.norm_sqr() + self.c2.norm_sqr() + self.c3.norm_sqr()
    }

    /// Largest component modulus; NaN if any component is NaN.
    pub fn max_modulus(self) -> f64 {
        max_nan([self.c1.norm(), self.c2.norm(), self.c3.norm()])
    }

    pub fn is_finite(self) -> bool {
        self.c1.is_finite() && self.c2.is_finite() && self.c3.is_finite()
    }
}

impl Add for ComplexVec3 {
    type Output = ComplexVec3;
    fn add(self, rhs: ComplexVec3) -> ComplexVec3 {
        ComplexVec3::new(self.c1 + rhs.c1, self.c2 + rhs.c2, self.c3 + rhs.c3)
    }
}

impl Sub for ComplexVec3 {
    type Output = ComplexVec3;
    fn sub(self, rhs: ComplexVec3) -> ComplexVec3 {
        ComplexVec3::new(self.c1 - rhs.c1, self.c2 - rhs.c2, self.c3 - rhs.c3)
    }
}

/// `max` that returns NaN once either side is NaN; use as a fold step.
pub(crate) fn nan_max(acc: f64, x: f64) -> f64 {
    if x.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

fn max_nan(a: [f64; 3]) -> f64 {
    a.into_iter().fold(0.0, nan_max)
}

/// The complex square `v·v = v₁² + v₂² + v₃²`.
pub fn cvec_square(v: ComplexVec3) -> ComplexScalar {
    v.c1 * v.c1 + v.c2 * v.c2 + v.c3 * v.c3
}

pub fn re_vec(v: ComplexVec3) -> RealVec3 {
    RealVec3::new(v.c1.re, v.c2.re, v.c3.re)
}

pub fn im_vec(v: ComplexVec3) -> RealVec3 {
    RealVec3::new(v.c1.im, v.c2.im, v.c3.im)
}

pub fn dot_real(a: RealVec3, b: RealVec3) -> f64 {
    a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3
}

pub fn cross(a: RealVec3, b: RealVec3) -> RealVec3 {
    RealVec3::new(
        a.x2 * b.x3 - a.x3 * b.x2,
        a.x3 * b.x1 - a.x1 * b.x3,
        a.x1 * b.x2 - a.x2 * b.x1,
    )
}

pub fn norm_sq(a: RealVec3) -> f64 {
    dot_real(a, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_of_unit_vector() {
        let v = ComplexVec3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(cvec_square(v), c(1.0, 0.0));
    }

    #[test]
    fn square_is_not_hermitian() {
        let v = ComplexVec3::new(I, c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(cvec_square(v), c(-1.0, 0.0));
    }

    #[test]
    fn enneper_phi_at_two_is_null() {
        // f = 1, g = z at z = 2
        let v = ComplexVec3::new(c(-3.0, 0.0), c(0.0, 5.0), c(4.0, 0.0));
        assert_eq!(cvec_square(v), c(0.0, 0.0));
    }

    #[test]
    fn real_and_imaginary_parts() {
        let v = ComplexVec3::new(c(1.0, 2.0), c(3.0, 0.0), c(0.0, -1.0));
        assert_eq!(re_vec(v), RealVec3::new(1.0, 3.0, 0.0));
        assert_eq!(im_vec(v), RealVec3::new(2.0, 0.0, -1.0));
    }

    #[test]
    fn maxima_propagate_nan() {
        assert!(RealVec3::new(1.0, f64::NAN, 0.0).max_abs().is_nan());
        assert!(ComplexVec3::new(c(0.0, f64::NAN), c(2.0, 0.0), c(0.0, 0.0))
            .max_modulus()
            .is_nan());
        assert_eq!(RealVec3::new(1.0, -3.0, 2.0).max_abs(), 3.0);
    }

    #[test]
    fn euclidean_basics() {
        let e1 = RealVec3::new(1.0, 0.0, 0.0);
        let e2 = RealVec3::new(0.0, 1.0, 0.0);
        assert_eq!(dot_real(e1, e2), 0.0);
        assert_eq!(cross(e1, e2), RealVec3::new(0.0, 0.0, 1.0));
        assert_eq!(norm_sq(RealVec3::new(3.0, 4.0, 0.0)), 25.0);
    }

    fn cvec() -> impl Strategy<Value = ComplexVec3> {
        prop::array::uniform6(-1e3f64..1e3)
            .prop_map(|a| ComplexVec3::new(c(a[0], a[1]), c(a[2], a[3]), c(a[4], a[5])))
    }

    proptest! {
        #[test]
        fn re_of_square_is_difference_of_norms(v in cvec()) {
            let lhs = cvec_square(v).re;
            let rhs = norm_sq(re_vec(v)) - norm_sq(im_vec(v));
            let scale = 1.0 + v.modulus_sq();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * scale);
        }

        #[test]
        fn im_of_square_is_twice_the_dot(v in cvec()) {
            let lhs = cvec_square(v).im;
            let rhs = 2.0 * dot_real(re_vec(v), im_vec(v));
            let scale = 1.0 + v.modulus_sq();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * scale);
        }

        #[test]
        fn re_of_i_times_v_is_minus_im(v in cvec()) {
            prop_assert_eq!(re_vec(v.scale(I)), -im_vec(v));
        }

        #[test]
        fn norm_sq_matches_dot(a in prop::array::uniform3(-1e3f64..1e3)) {
            let v = RealVec3::new(a[0], a[1], a[2]);
            prop_assert_eq!(norm_sq(v), dot_real(v, v));
        }
    }
}
