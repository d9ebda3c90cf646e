//! Number modes for amplitudes: exact ℚ(i, √2) or `Complex64`.

use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::field::{ExactComplex, QSqrt2};

/// Absolute tolerance used by the floating-point mode.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Real numbers produced by an amplitude field (probabilities, traces, minors).
pub trait RealValue:
    Clone
    + Debug
    + Display
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Equality, exact or within [`FLOAT_TOLERANCE`].
    fn approx_eq(&self, other: &Self) -> bool;
    /// `self ≥ 0`, exact or within tolerance.
    fn is_nonnegative(&self) -> bool;
    fn is_negligible(&self) -> bool {
        self.approx_eq(&Self::zero())
    }
    fn to_f64(&self) -> f64;
}

impl RealValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).abs() <= FLOAT_TOLERANCE
    }
    fn is_nonnegative(&self) -> bool {
        *self >= -FLOAT_TOLERANCE
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl RealValue for QSqrt2 {
    fn zero() -> Self {
        QSqrt2::zero()
    }
    fn one() -> Self {
        QSqrt2::one()
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn is_nonnegative(&self) -> bool {
        self.signum() != std::cmp::Ordering::Less
    }
    fn to_f64(&self) -> f64 {
        QSqrt2::to_f64(self)
    }
}

/// Complex amplitudes. Arithmetic is closed within one implementation, so a
/// computation never mixes exact and floating-point values.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    type Real: RealValue;

    fn zero() -> Self;
    fn one() -> Self;
    fn i() -> Self;
    fn frac_1_sqrt2() -> Self;
    fn from_real(value: Self::Real) -> Self;
    fn conj(&self) -> Self;
    fn re(&self) -> Self::Real;
    fn im(&self) -> Self::Real;
    fn norm_sqr(&self) -> Self::Real;
    fn inv(&self) -> Option<Self>;
    fn approx_eq(&self, other: &Self) -> bool;

    fn is_negligible(&self) -> bool {
        self.approx_eq(&Self::zero())
    }

    /// e^{ikπ/4}.
    fn unit_eighth(k: i64) -> Self;
}

impl Scalar for ExactComplex {
    type Real = QSqrt2;

    fn zero() -> Self {
        ExactComplex::default()
    }
    fn one() -> Self {
        ExactComplex::from_int(1)
    }
    fn i() -> Self {
        ExactComplex::i()
    }
    fn frac_1_sqrt2() -> Self {
        ExactComplex::frac_1_sqrt2()
    }
    fn from_real(value: QSqrt2) -> Self {
        ExactComplex::from_real(value)
    }
    fn conj(&self) -> Self {
        ExactComplex::conj(self)
    }
    fn re(&self) -> QSqrt2 {
        self.re.clone()
    }
    fn im(&self) -> QSqrt2 {
        self.im.clone()
    }
    fn norm_sqr(&self) -> QSqrt2 {
        ExactComplex::norm_sqr(self)
    }
    fn inv(&self) -> Option<Self> {
        ExactComplex::inv(self)
    }
    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }
    fn unit_eighth(k: i64) -> Self {
        ExactComplex::unit_eighth(k)
    }
}

impl Scalar for Complex64 {
    type Real = f64;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn frac_1_sqrt2() -> Self {
        Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }
    fn from_real(value: f64) -> Self {
        Complex64::new(value, 0.0)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }
    fn inv(&self) -> Option<Self> {
        (self.norm() > FLOAT_TOLERANCE).then(|| Complex64::inv(self))
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).norm() <= FLOAT_TOLERANCE
    }
    fn unit_eighth(k: i64) -> Self {
        Complex64::from_polar(1.0, k as f64 * std::f64::consts::FRAC_PI_4)
    }
}
