//! Möbius transformations (az + b)/(cz + d).

use std::fmt;

use super::field::Field;
use super::poly::Poly;
use super::ratfunc::{ProjPoint, RatFunc};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mobius<K: Field> {
    a: K,
    b: K,
    c: K,
    d: K,
}

impl<K: Field> Mobius<K> {
    pub fn new(a: K, b: K, c: K, d: K) -> Result<Self> {
        if (a.clone() * d.clone() - b.clone() * c.clone()).is_zero() {
            return Err(Error::InvalidTransform);
        }
        Ok(Mobius { a, b, c, d })
    }

    pub fn identity() -> Self {
        Mobius {
            a: K::one(),
            b: K::zero(),
            c: K::zero(),
            d: K::one(),
        }
    }

    /// z ↦ z + t
    pub fn translation(t: K) -> Self {
        Mobius {
            a: K::one(),
            b: t,
            c: K::zero(),
            d: K::one(),
        }
    }

    /// z ↦ s·z
    pub fn scaling(s: K) -> Result<Self> {
        Self::new(s, K::zero(), K::zero(), K::one())
    }

    /// z ↦ 1/z
    pub fn inversion() -> Self {
        Mobius {
            a: K::zero(),
            b: K::one(),
            c: K::one(),
            d: K::zero(),
        }
    }

    pub fn coefficients(&self) -> [&K; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn inverse(&self) -> Self {
        Mobius {
            a: self.d.clone(),
            b: -self.b.clone(),
            c: -self.c.clone(),
            d: self.a.clone(),
        }
    }

    /// self ∘ other
    pub fn then_after(&self, other: &Self) -> Self {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&other.a, &other.b, &other.c, &other.d);
        Mobius {
            a: a.clone() * e.clone() + b.clone() * g.clone(),
            b: a.clone() * f.clone() + b.clone() * h.clone(),
            c: c.clone() * e.clone() + d.clone() * g.clone(),
            d: c.clone() * f.clone() + d.clone() * h.clone(),
        }
    }

    pub fn apply(&self, p: &ProjPoint<K>) -> ProjPoint<K> {
        match p {
            ProjPoint::Infinity => {
                if self.c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(self.a.clone() / self.c.clone())
                }
            }
            ProjPoint::Finite(z) => {
                let den = self.c.clone() * z.clone() + self.d.clone();
                if den.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite((self.a.clone() * z.clone() + self.b.clone()) / den)
                }
            }
        }
    }

    /// The unique map sending p, q, r to 0, 1, ∞.
    pub fn to_zero_one_inf(p: &ProjPoint<K>, q: &ProjPoint<K>, r: &ProjPoint<K>) -> Result<Self> {
        if p == q || q == r || p == r {
            return Err(Error::InvalidTransform);
        }
        // (z − p)(q − r) / ((z − r)(q − p)), with the factors holding ∞ dropped
        let one = K::one();
        let zero = K::zero();
        let (num, den): ((K, K), (K, K)) = match (p, q, r) {
            (ProjPoint::Infinity, ProjPoint::Finite(q), ProjPoint::Finite(r)) => {
                ((zero.clone(), q.clone() - r.clone()), (one, -r.clone()))
            }
            (ProjPoint::Finite(p), ProjPoint::Infinity, ProjPoint::Finite(r)) => {
                ((one.clone(), -p.clone()), (one, -r.clone()))
            }
            (ProjPoint::Finite(p), ProjPoint::Finite(q), ProjPoint::Infinity) => {
                ((one, -p.clone()), (zero, q.clone() - p.clone()))
            }
            (ProjPoint::Finite(p), ProjPoint::Finite(q), ProjPoint::Finite(r)) => {
                let s = q.clone() - r.clone();
                let t = q.clone() - p.clone();
                ((s.clone(), -(s * p.clone())), (t.clone(), -(t * r.clone())))
            }
            _ => unreachable!("at most one point is infinite"),
        };
        Self::new(num.0, num.1, den.0, den.1)
    }

    /// The unique map sending (p1, p2, p3) to (q1, q2, q3).
    pub fn from_points(src: [&ProjPoint<K>; 3], dst: [&ProjPoint<K>; 3]) -> Result<Self> {
        let s = Self::to_zero_one_inf(src[0], src[1], src[2])?;
        let t = Self::to_zero_one_inf(dst[0], dst[1], dst[2])?;
        Ok(t.inverse().then_after(&s))
    }

    /// A map sending p ↦ 0 and q ↦ ∞ (and ∞ ↦ 1, or 1 ↦ 1 when ∞ is used).
    pub fn to_zero_inf(p: &ProjPoint<K>, q: &ProjPoint<K>) -> Result<Self> {
        match (p, q) {
            (ProjPoint::Finite(p), ProjPoint::Finite(q)) => {
                Self::new(K::one(), -p.clone(), K::one(), -q.clone())
            }
            (ProjPoint::Finite(p), ProjPoint::Infinity) => Ok(Self::translation(-p.clone())),
            (ProjPoint::Infinity, ProjPoint::Finite(q)) => {
                Self::new(K::zero(), K::one(), K::one(), -q.clone())
            }
            _ => Err(Error::InvalidTransform),
        }
    }

    pub fn to_ratfunc(&self) -> RatFunc<K> {
        RatFunc::new(
            Poly::new(vec![self.b.clone(), self.a.clone()]),
            Poly::new(vec![self.d.clone(), self.c.clone()]),
        )
        .expect("nondegenerate Möbius map has a nonzero denominator")
    }

    /// Recognizes a degree-one rational function.
    pub fn from_ratfunc(f: &RatFunc<K>) -> Result<Self> {
        if f.degree() != 1 {
            return Err(Error::InvalidTransform);
        }
        Self::new(
            f.num().coeff(1),
            f.num().coeff(0),
            f.den().coeff(1),
            f.den().coeff(0),
        )
    }

    pub fn to_expr(&self) -> String {
        self.to_ratfunc().to_expr()
    }
}

impl<K: Field> fmt::Debug for Mobius<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mobius({})", self.to_expr())
    }
}

impl<K: Field> fmt::Display for Mobius<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

/// m∘f∘m⁻¹
pub fn conjugate<K: Field>(f: &RatFunc<K>, m: &Mobius<K>) -> Result<RatFunc<K>> {
    let mf = m.to_ratfunc();
    let minv = m.inverse().to_ratfunc();
    mf.compose(&f.compose(&minv)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::field::{int, Rational};

    type M = Mobius<Rational>;

    fn q(num: &[i64], den: &[i64]) -> RatFunc<Rational> {
        RatFunc::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
    }

    #[test]
    fn conjugation_of_the_worked_example() {
        let a = q(&[0, 432, 144], &[81, -18, 1]);
        let mu = M::new(int(1), int(0), int(1), int(3)).unwrap();
        assert_eq!(conjugate(&a, &mu).unwrap(), q(&[0, 48], &[9, 24, 16]));
        assert_eq!(conjugate(&a, &M::identity()).unwrap(), a);
    }

    #[test]
    fn inversion_commutes_with_squaring() {
        let sq = q(&[0, 0, 1], &[1]);
        assert_eq!(conjugate(&sq, &M::inversion()).unwrap(), sq);
    }

    #[test]
    fn degenerate_is_rejected() {
        assert_eq!(
            M::new(int(1), int(2), int(2), int(4)),
            Err(Error::InvalidTransform)
        );
    }

    #[test]
    fn three_point_maps() {
        let pts = [ProjPoint::int(2), ProjPoint::Infinity, ProjPoint::int(-1)];
        let dst = [ProjPoint::int(0), ProjPoint::int(1), ProjPoint::Infinity];
        let m = M::from_points([&pts[0], &pts[1], &pts[2]], [&dst[0], &dst[1], &dst[2]]).unwrap();
        for (s, d) in pts.iter().zip(dst.iter()) {
            assert_eq!(&m.apply(s), d);
        }
        let m2 = M::to_zero_inf(&ProjPoint::int(2), &ProjPoint::int(5)).unwrap();
        assert_eq!(m2.apply(&ProjPoint::int(2)), ProjPoint::int(0));
        assert_eq!(m2.apply(&ProjPoint::int(5)), ProjPoint::Infinity);
        assert_eq!(
            m2.inverse().then_after(&m2).apply(&ProjPoint::int(7)),
            ProjPoint::int(7)
        );
    }
}
