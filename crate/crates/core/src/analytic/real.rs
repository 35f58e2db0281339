//! Floating scalar abstraction for the numeric layer.
//!
//! Everything numeric (root finding, fiber tracking) is written once against
//! [`Real`] and instantiated along the precision ladder
//! `f64 → BigFloat<128> → BigFloat<256> → BigFloat<512>`.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, Num, ToPrimitive, Zero};

pub trait Real:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    /// Significand width, used for tolerances and reporting.
    const BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn from_rational(q: &BigRational) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    /// Unit roundoff.
    fn epsilon() -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

macro_rules! impl_real_float {
    ($t:ty, $bits:expr) => {
        impl Real for $t {
            const BITS: u32 = $bits;

            fn from_f64(x: f64) -> Self {
                x as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn from_rational(q: &BigRational) -> Self {
                rational_to_f64(q) as $t
            }

            fn sqrt(&self) -> Self {
                Float::sqrt(*self)
            }

            fn abs(&self) -> Self {
                Float::abs(*self)
            }

            fn epsilon() -> Self {
                <$t as Float>::epsilon()
            }
        }
    };
}

impl_real_float!(f32, 24);
impl_real_float!(f64, 53);

/// Correctly scaled conversion that survives numerators and denominators far
/// outside the f64 range.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    let (n, d) = (q.numer(), q.denom());
    if n.is_zero() {
        return 0.0;
    }
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    // keep ~60 significant bits of each before the division
    let ns = (nb - 60).max(0);
    let ds = (db - 60).max(0);
    let nn: BigInt = n >> ns as usize;
    let dd: BigInt = d >> ds as usize;
    let v = nn.to_f64().unwrap_or(f64::NAN) / dd.to_f64().unwrap_or(f64::NAN);
    ldexp(v, ns - ds)
}

pub fn ldexp(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e as i32)
}

pub fn cabs<R: Real>(z: &Complex<R>) -> R {
    (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt()
}

pub fn c_from_f64<R: Real>(re: f64, im: f64) -> Complex<R> {
    Complex::new(R::from_f64(re), R::from_f64(im))
}

pub fn c_to_f64<R: Real>(z: &Complex<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn huge_rationals_convert() {
        let big = BigInt::from(3).pow(2000);
        let q = BigRational::new(big.clone() * 7, big);
        assert!((rational_to_f64(&q) - 7.0).abs() < 1e-14);
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(2).pow(1100));
        assert_eq!(rational_to_f64(&tiny), 0.0f64.max(ldexp(1.0, -1100)));
    }

    #[test]
    fn f32_is_a_real() {
        let x = <f32 as Real>::from_f64(2.0);
        assert!((Real::sqrt(&x) - std::f32::consts::SQRT_2).abs() < 1e-6);
    }
}
