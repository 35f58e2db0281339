//! Exact coefficient fields.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::analytic::real::Real;

pub type Rational = BigRational;

/// An exact field of characteristic zero embedded in ℂ.
///
/// Implemented by [`Rational`] (ℚ) and [`Scalar`](super::Scalar) (ℚ(√d)).
pub trait Field:
    Clone
    + Debug
    + Display
    + PartialEq
    + Eq
    + Hash
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_rational(q: Rational) -> Self;

    fn as_rational(&self) -> Option<Rational>;

    /// The radicand d of the quadratic field this value needs, `None` when
    /// the value is rational.
    fn field_tag(&self) -> Option<BigInt>;

    /// Nontrivial automorphism √d ↦ −√d (identity on ℚ).
    fn galois_conjugate(&self) -> Self;

    fn to_complex<R: Real>(&self) -> Complex<R>;

    /// a + b√d as an element of this field, when it is one.
    fn from_parts(a: Rational, b: Rational, d: &BigInt) -> Option<Self>;

    /// A parseable expression for this value, parenthesized when compound.
    fn to_expr(&self) -> String;

    fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    fn inv(&self) -> Self {
        Self::one() / self.clone()
    }

    fn compatible(&self, other: &Self) -> bool {
        match (self.field_tag(), other.field_tag()) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

impl Field for Rational {
    fn from_rational(q: Rational) -> Self {
        q
    }

    fn as_rational(&self) -> Option<Rational> {
        Some(self.clone())
    }

    fn field_tag(&self) -> Option<BigInt> {
        None
    }

    fn galois_conjugate(&self) -> Self {
        self.clone()
    }

    fn to_complex<R: Real>(&self) -> Complex<R> {
        Complex::new(R::from_rational(self), R::zero())
    }

    fn from_parts(a: Rational, b: Rational, _d: &BigInt) -> Option<Self> {
        b.is_zero().then_some(a)
    }

    fn to_expr(&self) -> String {
        rational_expr(self)
    }
}

pub fn rational_expr(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde helper: a rational as its expression string ("-1/4").
pub fn serialize_rational<S: serde::Serializer>(
    q: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational_expr(q))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Sign of a rational, as −1, 0, 1.
pub fn rational_sign(q: &Rational) -> i32 {
    if q.is_zero() {
        0
    } else if q.is_negative() {
        -1
    } else {
        1
    }
}
