//! Dense univariate polynomials over an exact [`Field`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use super::field::{Field, Rational};
use crate::error::{Error, Result};

/// Coefficients lowest degree first; no trailing zeros, so the zero
/// polynomial has no coefficients at all.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<K: Field> {
    coeffs: Vec<K>,
}

impl<K: Field> Poly<K> {
    pub fn new(mut coeffs: Vec<K>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| K::from_int(c)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn constant(c: K) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial z.
    pub fn x() -> Self {
        Self::new(vec![K::zero(), K::one()])
    }

    /// z − c
    pub fn linear_root(c: K) -> Self {
        Self::new(vec![-c, K::one()])
    }

    pub fn monomial(c: K, k: usize) -> Self {
        let mut v = vec![K::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(K::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> K {
        self.coeffs.last().cloned().unwrap_or_else(K::zero)
    }

    pub fn scale(&self, c: &K) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().inv())
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_one()
    }

    pub fn eval(&self, x: &K) -> K {
        let mut acc = K::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * K::from_int(i as i64))
                .collect(),
        )
    }

    pub fn pow(&self, mut n: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// self(inner(z)) by Horner's scheme.
    pub fn compose(&self, inner: &Poly<K>) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }

    /// Σ aᵢ pⁱ q^(n−i): the numerator of self(p/q)·qⁿ for n ≥ deg self.
    pub fn homogenize_at(&self, p: &Poly<K>, q: &Poly<K>, n: usize) -> Self {
        let d = self.deg();
        assert!(n >= d, "homogenizing degree below the polynomial degree");
        let mut qpow = vec![Self::one()];
        for k in 1..=n {
            let next = &qpow[k - 1] * q;
            qpow.push(next);
        }
        let mut ppow = Self::one();
        let mut out = Self::zero();
        for i in 0..=d {
            let c = self.coeff(i);
            if !c.is_zero() {
                out = &out + &(&ppow * &qpow[n - i]).scale(&c);
            }
            if i < d {
                ppow = &ppow * p;
            }
        }
        out
    }

    pub fn div_rem(&self, divisor: &Poly<K>) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.deg();
        if self.coeffs.len() < divisor.coeffs.len() {
            return (Self::zero(), self.clone());
        }
        let inv_lc = divisor.lc().inv();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![K::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() * inv_lc.clone();
            if !c.is_zero() {
                for (j, dc) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, divisor: &Poly<K>) -> Self {
        self.div_rem(divisor).1
    }

    /// Quotient of a division known to be exact.
    pub fn exact_div(&self, divisor: &Poly<K>) -> Self {
        let (q, r) = self.div_rem(divisor);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn divides(&self, other: &Poly<K>) -> bool {
        other.rem(self).is_zero()
    }

    /// Monic gcd (zero when both inputs are zero).
    pub fn gcd(&self, other: &Poly<K>) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    pub fn lcm(&self, other: &Poly<K>) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        (self * other).exact_div(&self.gcd(other)).monic()
    }

    /// Yun's square-free decomposition: `[(s₁,1), (s₂,2), …]` with
    /// self = lc · Π sᵢⁱ, every sᵢ monic square-free and pairwise coprime.
    /// Factors equal to 1 are omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly<K>, usize)> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.exact_div(&a);
        let mut c = df.exact_div(&a);
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if !g.is_constant() {
                out.push((g.clone(), i));
            }
            b = b.exact_div(&g);
            if b.is_constant() {
                break;
            }
            c = d.exact_div(&g);
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    pub fn squarefree_part(&self) -> Self {
        self.squarefree_decomposition()
            .into_iter()
            .fold(Self::one(), |acc, (s, _)| &acc * &s)
    }

    /// Multiplicity of the root c.
    pub fn root_multiplicity(&self, c: &K) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let lin = Self::linear_root(c.clone());
        let mut p = self.clone();
        let mut k = 0;
        loop {
            let (q, r) = p.div_rem(&lin);
            if !r.is_zero() {
                return k;
            }
            p = q;
            k += 1;
        }
    }

    /// Resultant by the Euclidean remainder sequence.
    pub fn resultant(&self, other: &Poly<K>) -> K {
        if self.is_zero() || other.is_zero() {
            return K::zero();
        }
        let (mut a, mut b) = (self.clone(), other.clone());
        let mut acc = K::one();
        loop {
            let (da, db) = (a.deg(), b.deg());
            if db == 0 {
                // res(a, c) = c^deg a
                let mut p = K::one();
                for _ in 0..da {
                    p = p * b.lc();
                }
                return acc * p;
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return K::zero();
            }
            // res(a,b) = (−1)^(da·db) · lc(b)^(da − dr) · res(b, r)
            if (da * db) % 2 == 1 {
                acc = -acc;
            }
            let dr = r.deg();
            for _ in 0..(da - dr) {
                acc = acc * b.lc();
            }
            a = b;
            b = r;
        }
    }

    /// The common radicand of all irrational coefficients.
    pub fn field_tag(&self) -> Result<Option<BigInt>> {
        merge_tags(self.coeffs.iter().map(|c| c.field_tag()))
    }

    pub fn galois_conjugate(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.galois_conjugate()).collect())
    }

    /// Coefficients as rationals when all are rational.
    pub fn to_rational(&self) -> Option<Poly<Rational>> {
        self.coeffs
            .iter()
            .map(|c| c.as_rational())
            .collect::<Option<Vec<_>>>()
            .map(Poly::new)
    }

    pub fn from_rational(p: &Poly<Rational>) -> Self {
        Self::new(
            p.coeffs()
                .iter()
                .map(|c| K::from_rational(c.clone()))
                .collect(),
        )
    }

    /// p(z) ↦ p(z) with every coefficient pushed through `f`.
    pub fn map_coeffs<L: Field>(&self, f: impl Fn(&K) -> L) -> Poly<L> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// zⁿ·p(1/z) for n = deg p, i.e. coefficients reversed.
    pub fn reversed(&self, n: usize) -> Self {
        let mut v: Vec<K> = (0..=n).map(|i| self.coeff(i)).collect();
        v.reverse();
        Self::new(v)
    }

    pub fn to_expr(&self) -> String {
        poly_expr(self)
    }
}

pub fn merge_tags(tags: impl Iterator<Item = Option<BigInt>>) -> Result<Option<BigInt>> {
    let mut seen: Option<BigInt> = None;
    for t in tags.flatten() {
        match &seen {
            None => seen = Some(t),
            Some(s) if *s == t => {}
            Some(s) => return Err(Error::FieldMismatch(s.to_string(), t.to_string())),
        }
    }
    Ok(seen)
}

fn poly_expr<K: Field>(p: &Poly<K>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "z".to_string(),
            _ => format!("z^{i}"),
        };
        let ce = c.to_expr();
        let term = if i == 0 {
            ce
        } else if c.is_one() {
            var
        } else if (-c.clone()).is_one() {
            format!("-{var}")
        } else {
            format!("{ce}*{var}")
        };
        if out.is_empty() {
            out = term;
        } else if let Some(rest) = term.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&term);
        }
    }
    out
}

impl<K: Field> fmt::Debug for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", poly_expr(self))
    }
}

impl<K: Field> fmt::Display for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&poly_expr(self))
    }
}

impl<K: Field> Add for &Poly<K> {
    type Output = Poly<K>;
    fn add(self, rhs: &Poly<K>) -> Poly<K> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<K: Field> Sub for &Poly<K> {
    type Output = Poly<K>;
    fn sub(self, rhs: &Poly<K>) -> Poly<K> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<K: Field> Mul for &Poly<K> {
    type Output = Poly<K>;
    fn mul(self, rhs: &Poly<K>) -> Poly<K> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![K::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<K: Field> Neg for &Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}
