//! Fixed-width binary floating point on top of `BigInt`.
//!
//! `BigFloat<P>` carries a `P`-bit significand and an unbounded exponent.
//! Rounding is to nearest on every operation except division, which
//! truncates two guard bits below the last place.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use super::real::{ldexp, Real};

#[derive(Clone, PartialEq, Eq)]
pub struct BigFloat<const P: u32> {
    mant: BigInt,
    exp: i64,
}

pub type F128 = BigFloat<128>;
pub type F256 = BigFloat<256>;
pub type F512 = BigFloat<512>;

fn round_shr(m: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return m.clone();
    }
    let neg = m.is_negative();
    let a = m.abs();
    let half = BigInt::one() << (shift - 1);
    let r: BigInt = (a + half) >> shift;
    if neg {
        -r
    } else {
        r
    }
}

impl<const P: u32> BigFloat<P> {
    fn normalized(mut mant: BigInt, mut exp: i64) -> Self {
        if mant.is_zero() {
            return BigFloat { mant, exp: 0 };
        }
        loop {
            let bits = mant.bits();
            if bits > P as u64 {
                let s = bits - P as u64;
                mant = round_shr(&mant, s);
                exp += s as i64;
            } else {
                if bits < P as u64 {
                    let s = P as u64 - bits;
                    mant <<= s;
                    exp -= s as i64;
                }
                return BigFloat { mant, exp };
            }
        }
    }

    fn is_neg(&self) -> bool {
        self.mant.sign() == Sign::Minus
    }

    fn trunc(&self) -> Self {
        if self.exp >= 0 || self.mant.is_zero() {
            return self.clone();
        }
        let a = self.mant.abs() >> ((-self.exp) as u64);
        let m = if self.is_neg() { -a } else { a };
        Self::normalized(m, 0)
    }
}

impl<const P: u32> fmt::Debug for BigFloat<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}[{}b]", self.to_f64(), P)
    }
}

impl<const P: u32> Zero for BigFloat<P> {
    fn zero() -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
        }
    }
    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }
}

impl<const P: u32> One for BigFloat<P> {
    fn one() -> Self {
        Self::normalized(BigInt::one(), 0)
    }
}

impl<const P: u32> Add for BigFloat<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = (hi.exp - lo.exp) as u64;
        if gap > P as u64 + 3 {
            return hi;
        }
        Self::normalized((hi.mant << gap) + lo.mant, lo.exp)
    }
}

impl<const P: u32> Neg for BigFloat<P> {
    type Output = Self;
    fn neg(self) -> Self {
        BigFloat {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl<const P: u32> Sub for BigFloat<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<const P: u32> Mul for BigFloat<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::normalized(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl<const P: u32> Div for BigFloat<P> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "BigFloat division by zero");
        let shift = P as u64 + 2;
        Self::normalized(
            (self.mant << shift) / rhs.mant,
            self.exp - rhs.exp - shift as i64,
        )
    }
}

impl<const P: u32> Rem for BigFloat<P> {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = (self.clone() / rhs.clone()).trunc();
        self - q * rhs
    }
}

impl<const P: u32> PartialOrd for BigFloat<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = self.clone() - other.clone();
        Some(match d.mant.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        })
    }
}

impl<const P: u32> Num for BigFloat<P> {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        if radix != 10 {
            return Err(format!("radix {radix} unsupported"));
        }
        let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
        Ok(Self::from_f64(v))
    }
}

impl<const P: u32> Real for BigFloat<P> {
    const BITS: u32 = P;

    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite f64 {x}");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0xf_ffff_ffff_ffff;
        let (m, e) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        Self::normalized(BigInt::from(m) * sign, e)
    }

    fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let s = bits.saturating_sub(62);
        let top = round_shr(&self.mant, s).to_f64().unwrap_or(0.0);
        ldexp(top, self.exp + s as i64)
    }

    fn from_rational(q: &BigRational) -> Self {
        let n = q.numer();
        let d = q.denom();
        if n.is_zero() {
            return Self::zero();
        }
        let s = (P as i64 + 4 + d.bits() as i64 - n.bits() as i64).max(0) as u64;
        Self::normalized((n << s) / d, -(s as i64))
    }

    fn sqrt(&self) -> Self {
        if self.mant.is_zero() || self.is_neg() {
            return Self::zero();
        }
        let (mut m, mut e) = (self.mant.clone(), self.exp);
        if e.rem_euclid(2) != 0 {
            m <<= 1u32;
            e -= 1;
        }
        let k = P as u64 + 4;
        let r = (m << (2 * k)).sqrt();
        Self::normalized(r, (e - 2 * k as i64) / 2)
    }

    fn abs(&self) -> Self {
        BigFloat {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    fn epsilon() -> Self {
        Self::normalized(BigInt::one(), 1 - P as i64)
    }

    fn from_int(n: i64) -> Self {
        Self::normalized(BigInt::from(n), 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_matches_f64_on_easy_values() {
        let a = F128::from_f64(1.5);
        let b = F128::from_f64(-0.25);
        assert_eq!((a.clone() + b.clone()).to_f64(), 1.25);
        assert_eq!((a.clone() * b.clone()).to_f64(), -0.375);
        assert_eq!((a.clone() / b.clone()).to_f64(), -6.0);
        assert!(b < a);
        assert_eq!(F128::from_f64(9.0).sqrt().to_f64(), 3.0);
    }

    #[test]
    fn sqrt_two_carries_more_than_double_precision() {
        let two = F256::from_int(2);
        let r = two.sqrt();
        let err = (r.clone() * r - F256::from_int(2)).abs();
        assert!(err < F256::from_f64(1e-70));
    }

    #[test]
    fn rational_roundtrip() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = F512::from_rational(&q);
        let back = x * F512::from_int(3) - F512::one();
        assert!(back.abs() < F512::from_f64(1e-150));
    }

    #[test]
    fn subnormal_and_negative_f64() {
        let x = F128::from_f64(-3.0e-310);
        assert!((x.to_f64() + 3.0e-310).abs() < 1e-320);
    }
}
