//! Exact arithmetic in the field ℚ(i, √2).
//!
//! Every amplitude of the stabilizer states, the Clifford gates with eighth
//! root phases, and the entangled PBR basis lives in this field. Probabilities
//! therefore come out as exact values instead of floats that need a tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

/// Shorthand for building a rational from small integers.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    InvalidInteger(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

/// Parses `"p/q"` or `"p"` (surrounding whitespace allowed) into a reduced rational.
pub fn parse_rational(text: &str) -> Result<BigRational, ParseRationalError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let parse_int = |s: &str| -> Result<BigInt, ParseRationalError> {
        let s = s.trim();
        // BigInt::from_str accepts a leading '+', which we allow, but not blanks
        if s.is_empty() || s.chars().skip(1).any(|c| !c.is_ascii_digit()) {
            return Err(ParseRationalError::InvalidInteger(s.to_string()));
        }
        BigInt::from_str(s).map_err(|_| ParseRationalError::InvalidInteger(s.to_string()))
    };
    match text.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(text)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(ParseRationalError::ZeroDenominator);
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Formats a rational as `"p/q"`, or `"p"` when the denominator is 1.
pub fn format_rational(value: &BigRational) -> String {
    value.to_string()
}

/// Serde adapters that keep rationals exact by writing them as strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(value: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(values: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(values.len()))?;
            for v in values {
                seq.serialize_element(&format_rational(v))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            let texts = Vec::<String>::deserialize(d)?;
            texts
                .iter()
                .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod grid {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(rows: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(rows.len()))?;
            for row in rows {
                let row: Vec<String> = row.iter().map(format_rational).collect();
                seq.serialize_element(&row)?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<BigRational>>, D::Error> {
            let rows = Vec::<Vec<String>>::deserialize(d)?;
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|t| parse_rational(t).map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

/// A real number `a + b·√2` with rational `a`, `b`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QSqrt2 {
    pub rational: BigRational,
    pub surd: BigRational,
}

impl QSqrt2 {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        Self { rational, surd }
    }

    pub fn from_rational(rational: BigRational) -> Self {
        Self { rational, surd: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(n.into()))
    }

    pub fn sqrt2() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    /// 1/√2 = √2/2.
    pub fn frac_1_sqrt2() -> Self {
        Self::new(BigRational::zero(), ratio(1, 2))
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }

    /// The value as a plain rational, if its √2 component vanishes.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.surd.is_zero().then_some(&self.rational)
    }

    /// Exact sign of `a + b√2`.
    pub fn signum(&self) -> Ordering {
        let a = &self.rational;
        let b = &self.surd;
        let sa = a.cmp(&BigRational::zero());
        let sb = b.cmp(&BigRational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (x, y) if x == y => x,
            // opposite signs: compare a² against 2b²
            (sa, _) => {
                let a2 = a * a;
                let b2 = b * b * BigRational::from_integer(2.into());
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        // (a + b√2)(a - b√2) = a² - 2b², nonzero because √2 is irrational
        let norm = &self.rational * &self.rational
            - &self.surd * &self.surd * BigRational::from_integer(2.into());
        Some(Self::new(&self.rational / &norm, -&self.surd / &norm))
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN)
            + self.surd.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }
}

impl PartialOrd for QSqrt2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QSqrt2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).signum()
    }
}

impl fmt::Debug for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rational.is_zero(), self.surd.is_zero()) {
            (_, true) => write!(f, "{}", self.rational),
            (true, false) => write!(f, "{}·√2", self.surd),
            (false, false) if self.surd.is_negative() => {
                write!(f, "{} - {}·√2", self.rational, -&self.surd)
            }
            (false, false) => write!(f, "{} + {}·√2", self.rational, self.surd),
        }
    }
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.rational + rhs.rational, self.surd + rhs.surd)
    }
}

impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.rational - rhs.rational, self.surd - rhs.surd)
    }
}

impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let two = BigRational::from_integer(2.into());
        Self::new(
            &self.rational * &rhs.rational + &self.surd * &rhs.surd * two,
            &self.rational * &rhs.surd + &self.surd * &rhs.rational,
        )
    }
}

impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.rational, -self.surd)
    }
}

/// A complex number `x + i·y` with `x, y ∈ ℚ(√2)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactComplex {
    pub re: QSqrt2,
    pub im: QSqrt2,
}

impl ExactComplex {
    pub fn new(re: QSqrt2, im: QSqrt2) -> Self {
        Self { re, im }
    }

    pub fn from_real(re: QSqrt2) -> Self {
        Self { re, im: QSqrt2::zero() }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Self::from_real(QSqrt2::from_rational(re))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_real(QSqrt2::from_int(n))
    }

    pub fn i() -> Self {
        Self::new(QSqrt2::zero(), QSqrt2::one())
    }

    pub fn frac_1_sqrt2() -> Self {
        Self::from_real(QSqrt2::frac_1_sqrt2())
    }

    /// e^{ikπ/4}, exactly.
    pub fn unit_eighth(k: i64) -> Self {
        let h = QSqrt2::frac_1_sqrt2;
        let (re, im) = match k.rem_euclid(8) {
            0 => (QSqrt2::one(), QSqrt2::zero()),
            1 => (h(), h()),
            2 => (QSqrt2::zero(), QSqrt2::one()),
            3 => (-h(), h()),
            4 => (-QSqrt2::one(), QSqrt2::zero()),
            5 => (-h(), -h()),
            6 => (QSqrt2::zero(), -QSqrt2::one()),
            _ => (h(), -h()),
        };
        Self::new(re, im)
    }

    /// If `self` equals e^{ikπ/4} for some k in 0..8, returns that k.
    pub fn as_unit_eighth(&self) -> Option<i64> {
        (0..8).find(|&k| *self == Self::unit_eighth(k))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> QSqrt2 {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        let n = self.norm_sqr().inv()?;
        Some(Self::new(self.re.clone() * n.clone(), -(self.im.clone() * n)))
    }

    pub fn to_complex64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Debug for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "i·({})", self.im)
        } else {
            write!(f, "({}) + i·({})", self.re, self.im)
        }
    }
}

impl Add for ExactComplex {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ExactComplex {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for ExactComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Self::new(re, im)
    }
}

impl Neg for ExactComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational(" -3/6 ").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("4").unwrap(), ratio(4, 1));
        assert_eq!(parse_rational("1/0"), Err(ParseRationalError::ZeroDenominator));
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1/2/3").is_err());
        assert_eq!(format_rational(&ratio(2, 4)), "1/2");
        assert_eq!(format_rational(&ratio(3, 1)), "3");
    }

    #[test]
    fn sqrt2_squares_to_two() {
        let s = QSqrt2::sqrt2();
        assert_eq!(s.clone() * s, QSqrt2::from_int(2));
        let h = QSqrt2::frac_1_sqrt2();
        assert_eq!(h.clone() * h, QSqrt2::from_rational(ratio(1, 2)));
    }

    #[test]
    fn signum_handles_mixed_signs() {
        // 3 - 2√2 ≈ 0.17 > 0
        assert_eq!(QSqrt2::new(ratio(3, 1), ratio(-2, 1)).signum(), Ordering::Greater);
        // 1 - √2 < 0
        assert_eq!(QSqrt2::new(ratio(1, 1), ratio(-1, 1)).signum(), Ordering::Less);
        // -1 + √2 > 0
        assert_eq!(QSqrt2::new(ratio(-1, 1), ratio(1, 1)).signum(), Ordering::Greater);
        assert_eq!(QSqrt2::zero().signum(), Ordering::Equal);
    }

    #[test]
    fn inverses() {
        let x = QSqrt2::new(ratio(1, 3), ratio(-5, 7));
        assert_eq!(x.clone() * x.inv().unwrap(), QSqrt2::one());
        let z = ExactComplex::new(x.clone(), QSqrt2::sqrt2());
        assert_eq!(z.clone() * z.inv().unwrap(), ExactComplex::from_int(1));
        assert!(QSqrt2::zero().inv().is_none());
    }

    #[test]
    fn eighth_roots_of_unity() {
        for k in 0..8 {
            let w = ExactComplex::unit_eighth(k);
            assert_eq!(w.norm_sqr(), QSqrt2::one());
            assert_eq!(w.as_unit_eighth(), Some(k));
        }
        let w = ExactComplex::unit_eighth(1);
        assert_eq!(w.clone() * w, ExactComplex::i());
    }
}
