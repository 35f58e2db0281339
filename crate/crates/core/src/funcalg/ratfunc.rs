//! Rational functions in reduced form, points of ℙ¹, composition and iteration.

use std::fmt;

use num_bigint::BigInt;

use super::field::{Field, Rational};
use super::poly::{merge_tags, Poly};
use crate::error::{Error, Result};

/// Default ceiling on the degree produced by [`RatFunc::compose`] and
/// [`RatFunc::iterate`].
pub const DEFAULT_DEGREE_CAP: usize = 4096;

/// A point of the Riemann sphere with coordinates in `K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ProjPoint<K: Field> {
    Finite(K),
    Infinity,
}

impl<K: Field> ProjPoint<K> {
    pub fn int(n: i64) -> Self {
        ProjPoint::Finite(K::from_int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    pub fn finite(&self) -> Option<&K> {
        match self {
            ProjPoint::Finite(v) => Some(v),
            ProjPoint::Infinity => None,
        }
    }

    pub fn to_expr(&self) -> String {
        match self {
            ProjPoint::Finite(v) => v.to_expr(),
            ProjPoint::Infinity => "inf".to_string(),
        }
    }
}

impl<K: Field> fmt::Display for ProjPoint<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

/// P/Q with gcd(P, Q) = 1 and Q monic. The zero function is 0/1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc<K: Field> {
    num: Poly<K>,
    den: Poly<K>,
}

impl<K: Field> RatFunc<K> {
    /// Reduces num/den; fails only when `den` is the zero polynomial.
    pub fn new(num: Poly<K>, den: Poly<K>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: Poly<K>, den: Poly<K>) -> Self {
        if num.is_zero() {
            return RatFunc {
                num,
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        let inv = den.lc().inv();
        RatFunc {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn from_poly(p: Poly<K>) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn constant(c: K) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn identity() -> Self {
        Self::from_poly(Poly::x())
    }

    pub fn num(&self) -> &Poly<K> {
        &self.num
    }

    pub fn den(&self) -> &Poly<K> {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn field_tag(&self) -> Result<Option<BigInt>> {
        merge_tags([self.num.field_tag()?, self.den.field_tag()?].into_iter())
    }

    /// Radicand shared by `self` and `other`, or a mismatch error.
    pub fn common_tag(&self, other: &Self) -> Result<Option<BigInt>> {
        merge_tags([self.field_tag()?, other.field_tag()?].into_iter())
    }

    pub fn galois_conjugate(&self) -> Self {
        RatFunc {
            num: self.num.galois_conjugate(),
            den: self.den.galois_conjugate(),
        }
    }

    pub fn to_rational(&self) -> Option<RatFunc<Rational>> {
        Some(RatFunc {
            num: self.num.to_rational()?,
            den: self.den.to_rational()?,
        })
    }

    pub fn from_rational(f: &RatFunc<Rational>) -> Self {
        RatFunc {
            num: Poly::from_rational(f.num()),
            den: Poly::from_rational(f.den()),
        }
    }

    /// self(g(z)) with the default degree ceiling.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.compose_capped(g, DEFAULT_DEGREE_CAP)
    }

    pub fn compose_capped(&self, g: &Self, cap: usize) -> Result<Self> {
        self.common_tag(g)?;
        let n = self.degree();
        let degree = n * g.degree().max(1);
        if degree > cap {
            return Err(Error::Capacity { degree, cap });
        }
        if self.is_constant() {
            return Ok(self.clone());
        }
        let num = self.num.homogenize_at(&g.num, &g.den, n);
        let den = self.den.homogenize_at(&g.num, &g.den, n);
        Ok(Self::reduced(num, den))
    }

    /// n-fold composition; n = 0 gives the identity.
    pub fn iterate(&self, n: usize) -> Result<Self> {
        self.iterate_capped(n, DEFAULT_DEGREE_CAP)
    }

    pub fn iterate_capped(&self, n: usize, cap: usize) -> Result<Self> {
        let d = self.degree();
        let mut total: usize = 1;
        for _ in 0..n {
            total = total.saturating_mul(d.max(1));
            if total > cap {
                return Err(Error::Capacity { degree: total, cap });
            }
        }
        let mut out = Self::identity();
        for _ in 0..n {
            out = self.compose_capped(&out, cap)?;
        }
        Ok(out)
    }

    pub fn eval(&self, p: &ProjPoint<K>) -> ProjPoint<K> {
        match p {
            ProjPoint::Finite(a) => {
                let q = self.den.eval(a);
                if q.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(self.num.eval(a) / q)
                }
            }
            ProjPoint::Infinity => self.value_at_infinity(),
        }
    }

    pub fn value_at_infinity(&self) -> ProjPoint<K> {
        let (dn, dd) = (self.num.deg(), self.den.deg());
        if self.num.is_zero() || dn < dd {
            ProjPoint::Finite(K::zero())
        } else if dn > dd {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(self.num.lc() / self.den.lc())
        }
    }

    /// P′Q − PQ′: its roots are the finite critical points (with the local
    /// degree one more than the multiplicity), except poles of order k,
    /// which appear with multiplicity k − 1 as well.
    pub fn critical_numerator(&self) -> Poly<K> {
        &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative())
    }

    /// f(1/z) inverted: the map w ↦ 1/f(1/w), which moves ∞ to 0 on both sides.
    pub fn at_infinity_chart(&self) -> Self {
        let n = self.degree();
        let num = self.den.reversed(n);
        let den = self.num.reversed(n);
        Self::reduced(num, den)
    }

    /// f(1/z) (source chart at ∞, target unchanged).
    pub fn source_inverted(&self) -> Self {
        let n = self.degree();
        Self::reduced(self.num.reversed(n), self.den.reversed(n))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.common_tag(other)?;
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Ok(Self::reduced(num, &self.den * &other.den))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.common_tag(other)?;
        Ok(Self::reduced(
            &self.num * &other.num,
            &self.den * &other.den,
        ))
    }

    /// Quotient; `None` when `other` is the zero function.
    pub fn div(&self, other: &Self) -> Result<Option<Self>> {
        self.common_tag(other)?;
        if other.num.is_zero() {
            return Ok(None);
        }
        Ok(Some(Self::reduced(
            &self.num * &other.den,
            &self.den * &other.num,
        )))
    }

    pub fn pow(&self, n: usize) -> Self {
        RatFunc {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    pub fn to_expr(&self) -> String {
        if self.den.is_one_poly() {
            return self.num.to_expr();
        }
        let wrap = |p: &Poly<K>| {
            let s = p.to_expr();
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
                || s.contains(' ')
                || s.starts_with('-')
            {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl<K: Field> Poly<K> {
    fn is_one_poly(&self) -> bool {
        self.is_constant() && self.coeff(0).is_one()
    }
}

impl<K: Field> fmt::Debug for RatFunc<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self.to_expr())
    }
}

impl<K: Field> fmt::Display for RatFunc<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::field::{int, rat};
    use crate::funcalg::scalar::Scalar;
    use num_traits::{One, Zero};

    type Q = RatFunc<Rational>;

    fn q(num: &[i64], den: &[i64]) -> Q {
        Q::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
    }

    fn big_a() -> Q {
        // 144z(z+3)/(z−9)²
        q(&[0, 432, 144], &[81, -18, 1])
    }

    #[test]
    fn reduction_is_canonical() {
        let f = q(&[2, 2], &[2, 4, 2]);
        assert_eq!(f, q(&[1], &[1, 1]));
        assert!(f.den().is_monic());
    }

    #[test]
    fn compose_examples() {
        let sq = q(&[0, 0, 1], &[1]);
        assert_eq!(sq.compose(&q(&[1, 1], &[1])).unwrap(), q(&[1, 2, 1], &[1]));
        let z8 = sq.iterate(3).unwrap();
        assert_eq!(z8, Q::from_poly(Poly::monomial(int(1), 8)));
        assert!(sq.iterate(0).unwrap().is_identity());
    }

    #[test]
    fn compose_over_sqrt3() {
        let r3 = Scalar::sqrt_of(&int(3)).unwrap();
        let s = |n: i64| Scalar::from_int(n);
        let f = RatFunc::new(
            Poly::new(vec![s(0), s(4) * r3]),
            Poly::new(vec![s(3), s(0), s(4)]),
        )
        .unwrap();
        let theta = RatFunc::from_poly(Poly::new(vec![s(0), s(0), s(1)]));
        let lhs = theta.compose(&f).unwrap();
        let expect = RatFunc::new(
            Poly::new(vec![s(0), s(0), s(48)]),
            Poly::new(vec![s(9), s(0), s(24), s(0), s(16)]),
        )
        .unwrap();
        assert_eq!(lhs, expect);
        let f2 = f.iterate(2).unwrap();
        let expect2 = RatFunc::new(
            Poly::new(vec![s(0), s(48), s(0), s(64)]),
            Poly::new(vec![s(9), s(0), s(88), s(0), s(16)]),
        )
        .unwrap();
        assert_eq!(f2, expect2);
        assert!(f2.to_rational().is_some());
    }

    #[test]
    fn mixed_radicands_are_rejected() {
        let a = RatFunc::constant(Scalar::sqrt_of(&int(2)).unwrap());
        let b = RatFunc::new(
            Poly::new(vec![Scalar::zero(), Scalar::sqrt_of(&int(3)).unwrap()]),
            Poly::one(),
        )
        .unwrap();
        let b = b.compose(&RatFunc::identity()).unwrap();
        assert!(matches!(
            RatFunc::from_poly(Poly::new(vec![
                Scalar::zero(),
                Scalar::one(),
                Scalar::sqrt_of(&int(5)).unwrap()
            ]))
            .compose(&b),
            Err(Error::FieldMismatch(..))
        ));
        assert!(a.compose(&RatFunc::identity()).is_ok());
    }

    #[test]
    fn eval_examples() {
        let a = big_a();
        assert_eq!(a.eval(&ProjPoint::int(1)), ProjPoint::int(9));
        assert_eq!(a.eval(&ProjPoint::int(9)), ProjPoint::Infinity);
        assert_eq!(a.eval(&ProjPoint::Infinity), ProjPoint::int(144));
        let inv = q(&[1], &[0, 1]);
        assert_eq!(inv.eval(&ProjPoint::Infinity), ProjPoint::int(0));
        assert_eq!(inv.eval(&ProjPoint::Finite(rat(1, 2))), ProjPoint::int(2));
    }

    #[test]
    fn capacity_error() {
        let f = q(&[0, 0, 0, 0, 1], &[1]);
        assert!(matches!(f.iterate(7), Err(Error::Capacity { .. })));
        assert_eq!(f.iterate(6).unwrap().degree(), 4096);
    }

    #[test]
    fn printing() {
        assert_eq!(big_a().to_string(), "(144*z^2 + 432*z)/(z^2 - 18*z + 81)");
        assert_eq!(q(&[1], &[0, 1]).to_string(), "1/z");
        assert_eq!(q(&[0, 0, 1], &[1]).to_string(), "z^2");
    }
}
