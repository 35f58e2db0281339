//! Elements a + b√d of a quadratic field ℚ(√d).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::field::{rational_expr, Field, Rational};
use crate::analytic::real::Real;
use crate::error::{Error, Result};

/// a + b√d with d square-free. Rational values are stored with b = 0 and
/// d = 1, so equality is structural.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scalar {
    a: Rational,
    b: Rational,
    d: BigInt,
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        self.d.hash(state);
    }
}

impl Scalar {
    pub fn rational(a: Rational) -> Self {
        Scalar {
            a,
            b: Rational::zero(),
            d: BigInt::one(),
        }
    }

    /// a + b√d; `d` must already be square-free.
    pub fn new(a: Rational, b: Rational, d: BigInt) -> Self {
        if b.is_zero() || d.is_one() {
            let a = if d.is_one() { a + b } else { a };
            return Scalar::rational(a);
        }
        assert!(!d.is_zero(), "sqrt(0) is not a field generator");
        Scalar { a, b, d }
    }

    /// √q for a rational q, reduced to b√d with d square-free.
    pub fn sqrt_of(q: &Rational) -> Result<Self> {
        if q.is_zero() {
            return Ok(Scalar::rational(Rational::zero()));
        }
        // √(p/r) = √(p·r)/r
        let radicand: BigInt = q.numer() * q.denom();
        let (square, free) = split_square(&radicand)?;
        let coeff = Rational::new(square, q.denom().clone());
        Ok(Scalar::new(Rational::zero(), coeff, free))
    }

    pub fn real_part(&self) -> &Rational {
        &self.a
    }

    pub fn radical_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    fn pick_d(&self, other: &Scalar) -> BigInt {
        if self.is_rational() {
            other.d.clone()
        } else {
            if !other.is_rational() && other.d != self.d {
                panic!(
                    "field mismatch: sqrt({}) and sqrt({}) combined without a compatibility check",
                    self.d, other.d
                );
            }
            self.d.clone()
        }
    }

    /// Norm a² − d·b² to ℚ.
    pub fn norm(&self) -> Rational {
        self.a.clone() * self.a.clone()
            - Rational::from_integer(self.d.clone()) * self.b.clone() * self.b.clone()
    }
}

/// n = s²·f with f square-free (sign kept in f). Trial division, so the
/// radicand must stay moderate.
fn split_square(n: &BigInt) -> Result<(BigInt, BigInt)> {
    let neg = n.is_negative();
    let mut m = n.abs();
    if m.bits() > 64 {
        return Err(Error::Unsupported(format!(
            "radicand {n} too large to make square-free"
        )));
    }
    let mut square = BigInt::one();
    let mut free = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= m {
        let mut e = 0u32;
        while (&m % &p).is_zero() {
            m /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            square *= &p;
        }
        if e % 2 == 1 {
            free *= &p;
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    free *= m;
    if neg {
        free = -free;
    }
    Ok((square, free))
}

impl Zero for Scalar {
    fn zero() -> Self {
        Scalar::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Scalar {
    fn one() -> Self {
        Scalar::rational(Rational::one())
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        let d = self.pick_d(&rhs);
        Scalar::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        let d = self.pick_d(&rhs);
        Scalar::new(self.a - rhs.a, self.b - rhs.b, d)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            a: -self.a,
            b: -self.b,
            d: self.d,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        let d = self.pick_d(&rhs);
        let dq = Rational::from_integer(d.clone());
        let a = self.a.clone() * rhs.a.clone() + dq * self.b.clone() * rhs.b.clone();
        let b = self.a * rhs.b + self.b * rhs.a;
        Scalar::new(a, b, d)
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, rhs: Scalar) -> Scalar {
        assert!(!rhs.is_zero(), "division by zero scalar");
        let n = rhs.norm();
        let conj = rhs.galois_conjugate();
        let num = self * conj;
        Scalar::new(num.a / n.clone(), num.b / n, num.d)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

impl Field for Scalar {
    fn from_rational(q: Rational) -> Self {
        Scalar::rational(q)
    }

    fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.a.clone())
    }

    fn field_tag(&self) -> Option<BigInt> {
        (!self.is_rational()).then(|| self.d.clone())
    }

    fn galois_conjugate(&self) -> Self {
        Scalar {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }

    fn to_complex<R: Real>(&self) -> Complex<R> {
        let a = R::from_rational(&self.a);
        if self.is_rational() {
            return Complex::new(a, R::zero());
        }
        let root = R::from_rational(&Rational::from_integer(self.d.abs())).sqrt();
        let b = R::from_rational(&self.b) * root;
        if self.d.is_negative() {
            Complex::new(a, b)
        } else {
            Complex::new(a + b, R::zero())
        }
    }

    fn from_parts(a: Rational, b: Rational, d: &BigInt) -> Option<Self> {
        Some(Scalar::new(a, b, d.clone()))
    }

    fn to_expr(&self) -> String {
        if self.is_rational() {
            return rational_expr(&self.a);
        }
        let rad = format!("sqrt({})", self.d);
        let bpart = if self.b.is_one() {
            rad
        } else if (-self.b.clone()).is_one() {
            format!("-{rad}")
        } else {
            format!("{}*{rad}", rational_expr(&self.b))
        };
        if self.a.is_zero() {
            bpart
        } else if let Some(b) = bpart.strip_prefix('-') {
            format!("({} - {})", rational_expr(&self.a), b)
        } else {
            format!("({} + {})", rational_expr(&self.a), bpart)
        }
    }
}

/// Small-integer radicand as i64, for display and tests.
pub fn radicand_i64(s: &Scalar) -> Option<i64> {
    s.d.to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::field::{int, rat};

    fn s3() -> Scalar {
        Scalar::sqrt_of(&int(3)).unwrap()
    }

    #[test]
    fn sqrt_is_reduced() {
        let r12 = Scalar::sqrt_of(&int(12)).unwrap();
        assert_eq!(r12, Scalar::new(int(0), int(2), BigInt::from(3)));
        assert_eq!(Scalar::sqrt_of(&int(4)).unwrap(), Scalar::rational(int(2)));
        // √(1/3) = √3/3
        assert_eq!(
            Scalar::sqrt_of(&rat(1, 3)).unwrap(),
            Scalar::new(int(0), rat(1, 3), BigInt::from(3))
        );
    }

    #[test]
    fn field_operations() {
        let r = s3();
        assert_eq!(r.clone() * r.clone(), Scalar::rational(int(3)));
        let x = Scalar::rational(int(1)) + r.clone();
        let y = x.clone() / x.clone();
        assert!(y.is_one());
        assert_eq!(x.norm(), int(-2));
        assert_eq!((x.clone() - r).as_rational(), Some(int(1)));
    }

    #[test]
    fn complex_embedding_of_negative_radicand() {
        let i = Scalar::sqrt_of(&int(-1)).unwrap();
        let c = i.to_complex::<f64>();
        assert_eq!((c.re, c.im), (0.0, 1.0));
        assert_eq!((i.clone() * i).as_rational(), Some(int(-1)));
    }

    #[test]
    #[should_panic(expected = "field mismatch")]
    fn mixing_radicands_panics_in_raw_arithmetic() {
        let _ = s3() + Scalar::sqrt_of(&int(2)).unwrap();
    }

    #[test]
    fn expressions() {
        assert_eq!(s3().to_expr(), "sqrt(3)");
        let x = Scalar::new(rat(1, 2), int(-4), BigInt::from(3));
        assert_eq!(x.to_expr(), "(1/2 - 4*sqrt(3))");
    }
}
