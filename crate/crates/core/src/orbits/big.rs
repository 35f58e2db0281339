//! Big-integer engine for orbits over ℚ: homogeneous evaluation of integer
//! forms and exact rational preimages.

use std::str::FromStr;

use malachite::num::arithmetic::traits::{
    CheckedRoot, DivExact, DivRem, Gcd, Mod, ModInverse, UnsignedAbs,
};
use malachite::num::basic::traits::{One as _, Zero as _};
use malachite::num::logic::traits::SignificantBits;
use malachite::{Integer, Natural};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::funcalg::{Poly, ProjPoint, RatFunc, Rational};

/// Coefficient size above which the general preimage solver refuses to run
/// (its rational reconstruction is quadratic).
pub const GENERAL_ROOT_BITS: u64 = 1 << 16;

/// p/q in lowest terms with q ≥ 0; (1, 0) is ∞.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigPoint {
    pub p: Integer,
    pub q: Integer,
}

impl BigPoint {
    pub fn infinity() -> Self {
        BigPoint {
            p: Integer::ONE,
            q: Integer::ZERO,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.q == Integer::ZERO
    }

    /// Reduces by a known multiple of gcd(p, q), which must be nonzero.
    fn normalized(mut p: Integer, mut q: Integer, gcd_divides: &Natural) -> Self {
        if q == Integer::ZERO {
            return Self::infinity();
        }
        let pm = Natural::from_str(&(&p).mod_op(Integer::from(gcd_divides.clone())).to_string())
            .expect("natural");
        let qm = Natural::from_str(&(&q).mod_op(Integer::from(gcd_divides.clone())).to_string())
            .expect("natural");
        let g = pm.gcd(&qm).gcd(gcd_divides);
        if g != Natural::ONE {
            let g = Integer::from(g);
            p = p.div_exact(&g);
            q = q.div_exact(&g);
        }
        if q < Integer::ZERO {
            p = -p;
            q = -q;
        }
        BigPoint { p, q }
    }

    pub fn from_proj(x: &ProjPoint<Rational>) -> Self {
        match x.finite() {
            None => Self::infinity(),
            Some(v) => BigPoint {
                p: to_integer(v.numer()),
                q: to_integer(v.denom()),
            },
        }
    }

    pub fn to_proj(&self) -> ProjPoint<Rational> {
        if self.is_infinite() {
            return ProjPoint::Infinity;
        }
        let p = num_bigint::BigInt::from_str(&self.p.to_string()).expect("integer");
        let q = num_bigint::BigInt::from_str(&self.q.to_string()).expect("integer");
        ProjPoint::Finite(Rational::new(p, q))
    }

    /// Bit length of max(|p|, |q|).
    pub fn height_bits(&self) -> u64 {
        self.p.significant_bits().max(self.q.significant_bits())
    }

    /// The value as text, or a height summary above `max_bits`.
    pub fn display(&self, max_bits: u64) -> String {
        if self.is_infinite() {
            "inf".to_string()
        } else if self.height_bits() > max_bits {
            format!("<rational of height {} bits>", self.height_bits())
        } else if self.q == Integer::ONE {
            self.p.to_string()
        } else {
            format!("{}/{}", self.p, self.q)
        }
    }
}

fn to_integer(n: &num_bigint::BigInt) -> Integer {
    Integer::from_str(&n.to_string()).expect("integer")
}

/// A rational map over ℚ as a pair of integer binary forms of degree n.
#[derive(Clone, Debug)]
pub struct IntForm {
    pub num: Vec<Integer>,
    pub den: Vec<Integer>,
    pub n: usize,
    /// |Res(num, den)| as forms; divides gcd(num(p, q), den(p, q)) for
    /// coprime p, q.
    res: Natural,
}

impl IntForm {
    pub fn new(f: &RatFunc<Rational>) -> Self {
        let lcm = f
            .num()
            .coeffs()
            .iter()
            .chain(f.den().coeffs())
            .fold(num_bigint::BigInt::from(1), |acc, c| {
                num_integer::Integer::lcm(&acc, c.denom())
            });
        let scale = Rational::from_integer(lcm);
        let num = f.num().scale(&scale);
        let den = f.den().scale(&scale);
        let n = f.degree();
        let mut res = num.resultant(&den).abs();
        // forms of degree n: a missing top degree contributes lc powers
        let (dn, dd) = (num.deg(), den.deg());
        for _ in dd..n {
            res *= num.lc().abs();
        }
        for _ in dn..n {
            res *= den.lc().abs();
        }
        debug_assert!(!res.is_zero() && res.is_integer());
        let ints = |p: &Poly<Rational>| {
            let mut v: Vec<Integer> = p.coeffs().iter().map(|c| to_integer(c.numer())).collect();
            v.resize(n + 1, Integer::ZERO);
            v
        };
        IntForm {
            num: ints(&num),
            den: ints(&den),
            n,
            res: Natural::from_str(&res.numer().to_string()).expect("natural"),
        }
    }

    /// (num(p, q), den(p, q)) without reduction.
    pub fn eval_raw(&self, x: &BigPoint) -> (Integer, Integer) {
        let mut qpow = Vec::with_capacity(self.n + 1);
        qpow.push(Integer::ONE);
        for k in 1..=self.n {
            qpow.push(&qpow[k - 1] * &x.q);
        }
        let form = |c: &[Integer]| {
            let mut acc = c[self.n].clone();
            for i in (0..self.n).rev() {
                acc = acc * &x.p + &c[i] * &qpow[self.n - i];
            }
            acc
        };
        (form(&self.num), form(&self.den))
    }

    pub fn eval(&self, x: &BigPoint) -> BigPoint {
        let (a, b) = self.eval_raw(x);
        BigPoint::normalized(a, b, &self.res)
    }

    /// f(y) = x exactly.
    pub fn maps_to(&self, y: &BigPoint, x: &BigPoint) -> bool {
        let (a, b) = self.eval_raw(y);
        // for coprime x, a·x.q = b·x.p iff (a, b) = k·(x.p, x.q); k is small,
        // so one division and one short product replace two long ones
        let (big, other, xb, xo) = if (&x.p).unsigned_abs() >= (&x.q).unsigned_abs() {
            (&a, &b, &x.p, &x.q)
        } else {
            (&b, &a, &x.q, &x.p)
        };
        let (k, r) = big.div_rem(xb);
        if r == Integer::ZERO {
            return *other == &k * xo;
        }
        a * &x.q == b * &x.p
    }
}

/// Exact solver for f(y) = c with f over ℚ.
#[derive(Clone, Debug)]
pub struct Preimager {
    form: IntForm,
    /// f = λ z^{±k}: (k, exponent sign, λ numerator, λ denominator).
    monomial: Option<(u64, bool, Integer, Natural)>,
}

impl Preimager {
    pub fn new(f: &RatFunc<Rational>) -> Self {
        let form = IntForm::new(f);
        let single = |p: &Poly<Rational>| p.coeffs().iter().filter(|c| !c.is_zero()).count() == 1;
        let monomial = if single(f.num()) && single(f.den()) {
            let (dn, dd) = (f.num().deg(), f.den().deg());
            let lam = f.num().lc() / f.den().lc();
            let (ln, ld) = (
                to_integer(lam.numer()),
                Natural::from_str(&lam.denom().to_string()).expect("natural"),
            );
            if dd == 0 {
                Some((dn as u64, true, ln, ld))
            } else if dn == 0 {
                Some((dd as u64, false, ln, ld))
            } else {
                None
            }
        } else {
            None
        };
        Preimager { form, monomial }
    }

    pub fn form(&self) -> &IntForm {
        &self.form
    }

    /// All y ∈ ℙ¹(ℚ) with f(y) = c, each verified exactly.
    pub fn solve(&self, c: &BigPoint) -> Result<Vec<BigPoint>> {
        let (out, checked) = match &self.monomial {
            // −y has the image of y under an even monomial
            Some((k, positive, ln, ld)) => (monomial_roots(*k, *positive, ln, ld, c), 1),
            None => {
                let out = self.general(c)?;
                let n = out.len();
                (out, n)
            }
        };
        for y in out.iter().take(checked) {
            if !self.form.maps_to(y, c) {
                return Err(Error::Inconsistent(format!(
                    "preimage {} failed verification",
                    y.display(256)
                )));
            }
        }
        Ok(out)
    }

    /// Rational roots of q·num(y) − p·den(y), plus ∞ when its degree drops.
    fn general(&self, c: &BigPoint) -> Result<Vec<BigPoint>> {
        let poly: Vec<Integer> = self
            .form
            .num
            .iter()
            .zip(&self.form.den)
            .map(|(a, b)| a * &c.q - b * &c.p)
            .collect();
        let mut out = rational_roots(&poly)?;
        if poly[self.form.n] == Integer::ZERO {
            out.push(BigPoint::infinity());
        }
        Ok(out)
    }
}

/// y with λ y^{±k} = c, positive root first.
fn monomial_roots(
    k: u64,
    positive: bool,
    ln: &Integer,
    ld: &Natural,
    c: &BigPoint,
) -> Vec<BigPoint> {
    let zero_or_inf = |want_zero: bool| {
        if want_zero {
            vec![BigPoint {
                p: Integer::ZERO,
                q: Integer::ONE,
            }]
        } else {
            vec![BigPoint::infinity()]
        }
    };
    if c.is_infinite() {
        return zero_or_inf(!positive);
    }
    if c.p == Integer::ZERO {
        return zero_or_inf(positive);
    }
    // y^k = t/s with t/s = c/λ (or λ/c)
    let lnn = ln.unsigned_abs();
    let (mut t, mut s) = if positive {
        (&c.p * Integer::from(ld.clone()), &c.q * ln)
    } else {
        (ln * &c.q, Integer::from(ld.clone()) * &c.p)
    };
    let small = Integer::from(lnn.clone() * ld);
    let g = Natural::from_str(&(&t).mod_op(&small).to_string())
        .expect("natural")
        .gcd(Natural::from_str(&(&s).mod_op(&small).to_string()).expect("natural"))
        .gcd(Natural::from_str(&small.to_string()).expect("natural"));
    if g != Natural::ONE {
        let g = Integer::from(g);
        t = t.div_exact(&g);
        s = s.div_exact(&g);
    }
    if s < Integer::ZERO {
        t = -t;
        s = -s;
    }
    if k.is_multiple_of(2) && t < Integer::ZERO {
        return Vec::new();
    }
    if !maybe_kth_powers(k, &t, &s) {
        return Vec::new();
    }
    let (Some(r), Some(d)) = ((&t).checked_root(k), (&s).checked_root(k)) else {
        return Vec::new();
    };
    let mut out = vec![BigPoint {
        p: r.clone(),
        q: d.clone(),
    }];
    if k.is_multiple_of(2) {
        out.push(BigPoint { p: -r, q: d });
    }
    out
}

/// False when t or s is certainly not a k-th power: some small prime sees a
/// residue that is not a k-th power.
fn maybe_kth_powers(k: u64, t: &Integer, s: &Integer) -> bool {
    small_primes(16).into_iter().all(|p| {
        let e = (p - 1) / num_integer::Integer::gcd(&k, &(p - 1));
        [t, s].iter().all(|v| {
            let r = mod_small(v, p);
            r == 0 || pow_mod(r, e, p) == 1
        })
    })
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn small_primes(count: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 1009u64;
    while out.len() < count {
        if (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
        {
            out.push(p);
        }
        p += 2;
    }
    out
}

fn mod_small(c: &Integer, p: u64) -> u64 {
    let r = c.mod_op(Integer::from(p));
    u64::from_str(&r.to_string()).expect("small residue")
}

fn poly_mod_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    let trim = |v: &mut Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        b %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = pow(*b.last().expect("nonzero"), p - 2);
        while a.len() >= b.len() {
            let f = a.last().expect("nonzero") * inv % p;
            let off = a.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                a[off + i] = (a[off + i] + p - f * bi % p) % p;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn eval_mod(c: &[Integer], x: &Integer, m: &Integer) -> Integer {
    let mut acc = Integer::ZERO;
    for ci in c.iter().rev() {
        acc = (acc * x + ci).mod_op(m);
    }
    acc
}

/// Rational roots of an integer polynomial by p-adic lifting and rational
/// reconstruction; a root r/s has r | c₀ and s | c_d, which bounds the
/// lifting precision.
pub fn rational_roots(coeffs: &[Integer]) -> Result<Vec<BigPoint>> {
    match simple_rational_roots(coeffs) {
        Err(Error::Budget(m)) if m.starts_with("no prime") => {
            // repeated roots: every reduction is inseparable
            let sf = squarefree_integer_part(coeffs);
            if sf.len() == coeffs.len() {
                return Err(Error::Budget(m));
            }
            simple_rational_roots(&sf)
        }
        r => r,
    }
}

/// Primitive integer polynomial with the same roots and no repeated factor.
fn squarefree_integer_part(coeffs: &[Integer]) -> Vec<Integer> {
    let p = Poly::new(
        coeffs
            .iter()
            .map(|c| {
                Rational::from_integer(
                    num_bigint::BigInt::from_str(&c.to_string()).expect("integer"),
                )
            })
            .collect(),
    );
    let sf = p.squarefree_part();
    let den = sf
        .coeffs()
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, c| {
            num_integer::lcm(acc, c.denom().clone())
        });
    sf.coeffs()
        .iter()
        .map(|c| to_integer(&(c * Rational::from_integer(den.clone())).to_integer()))
        .collect()
}

fn simple_rational_roots(coeffs: &[Integer]) -> Result<Vec<BigPoint>> {
    let mut c: Vec<Integer> = coeffs.to_vec();
    while c.last() == Some(&Integer::ZERO) {
        c.pop();
    }
    let mut out = Vec::new();
    if c.len() <= 1 {
        return Ok(out);
    }
    if c[0] == Integer::ZERO {
        out.push(BigPoint {
            p: Integer::ZERO,
            q: Integer::ONE,
        });
        let shift = c.iter().take_while(|x| **x == Integer::ZERO).count();
        c.drain(..shift);
    }
    let d = c.len() - 1;
    if d == 0 {
        return Ok(out);
    }
    let bound = (&c[0]).unsigned_abs().max((&c[d]).unsigned_abs());
    if bound.significant_bits() > GENERAL_ROOT_BITS {
        return Err(Error::Budget(format!(
            "rational roots of a polynomial with {}-bit coefficients",
            bound.significant_bits()
        )));
    }
    let target = Integer::from(&bound * &bound * Natural::from(2u32));
    let deriv: Vec<Integer> = (1..=d).map(|i| &c[i] * Integer::from(i as u64)).collect();
    let Some((p, roots)) = small_primes(64).into_iter().find_map(|p| {
        let cm: Vec<u64> = c.iter().map(|x| mod_small(x, p)).collect();
        if cm[d] == 0 {
            return None;
        }
        let dm: Vec<u64> = deriv.iter().map(|x| mod_small(x, p)).collect();
        if poly_mod_gcd(cm.clone(), dm, p) != 0 {
            return None;
        }
        let roots: Vec<u64> = (0..p)
            .filter(|&x| cm.iter().rev().fold(0u64, |acc, &ci| (acc * x + ci) % p) == 0)
            .collect();
        Some((p, roots))
    }) else {
        return Err(Error::Budget(
            "no prime of good reduction among the first 64 tried".into(),
        ));
    };
    let bound_i = Integer::from(bound.clone());
    for r0 in roots {
        let mut m = Integer::from(p);
        let mut x = Integer::from(r0);
        while m <= target {
            m = &m * &m;
            let fx = eval_mod(&c, &x, &m);
            let dfx = Natural::from_str(&eval_mod(&deriv, &x, &m).to_string()).expect("natural");
            let mn = Natural::from_str(&m.to_string()).expect("natural");
            let inv = Integer::from(dfx.mod_inverse(&mn).expect("simple root mod p lifts"));
            x = (x - fx * inv).mod_op(&m);
        }
        // r ≡ s·x (mod m) with |r|, |s| ≤ bound
        let (mut r0, mut r1) = (m.clone(), x);
        let (mut t0, mut t1) = (Integer::ZERO, Integer::ONE);
        while r1 > bound_i {
            let q = &r0 / &r1;
            let r2 = &r0 - &q * &r1;
            let t2 = &t0 - &q * &t1;
            r0 = std::mem::replace(&mut r1, r2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let (mut r, mut s) = (r1, t1);
        if s < Integer::ZERO {
            r = -r;
            s = -s;
        }
        if s == Integer::ZERO || s > bound_i {
            continue;
        }
        // homogeneous check Σ cᵢ rⁱ s^{d−i} = 0
        let mut acc = Integer::ZERO;
        let mut spow = Integer::ONE;
        let mut terms = Vec::with_capacity(d + 1);
        for _ in 0..=d {
            terms.push(spow.clone());
            spow *= &s;
        }
        for i in (0..=d).rev() {
            acc = acc * &r + &c[i] * &terms[d - i];
        }
        if acc == Integer::ZERO {
            let g = (&r).unsigned_abs().gcd((&s).unsigned_abs());
            let g = Integer::from(g);
            out.push(BigPoint {
                p: r.div_exact(&g),
                q: s.div_exact(&g),
            });
        }
    }
    Ok(out)
}
