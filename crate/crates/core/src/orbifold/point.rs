//! Points of the sphere that arise from exact data: K-rational values, ∞,
//! and algebraic numbers given by a square-free polynomial over K and a disk
//! isolating one of its roots.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::analytic::{roots_squarefree, ComplexApprox};
use crate::error::{Error, Result};
use crate::funcalg::{Field, Mobius, Poly, ProjPoint, RatFunc, Rational};

#[derive(Clone)]
pub struct AlgPoint<K: Field> {
    /// Monic and square-free; not necessarily irreducible.
    pub poly: Poly<K>,
    pub approx: ComplexApprox,
}

#[derive(Clone)]
pub enum Point<K: Field> {
    Infinity,
    Exact(K),
    Algebraic(AlgPoint<K>),
}

impl<K: Field> Point<K> {
    pub fn int(n: i64) -> Self {
        Point::Exact(K::from_int(n))
    }

    pub fn from_proj(p: &ProjPoint<K>) -> Self {
        match p {
            ProjPoint::Infinity => Point::Infinity,
            ProjPoint::Finite(v) => Point::Exact(v.clone()),
        }
    }

    pub fn to_proj(&self) -> Option<ProjPoint<K>> {
        match self {
            Point::Infinity => Some(ProjPoint::Infinity),
            Point::Exact(v) => Some(ProjPoint::Finite(v.clone())),
            Point::Algebraic(_) => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn exact(&self) -> Option<&K> {
        match self {
            Point::Exact(v) => Some(v),
            _ => None,
        }
    }

    /// Center of the numeric approximation; `None` at ∞.
    pub fn approx(&self) -> Option<Complex<f64>> {
        match self {
            Point::Infinity => None,
            Point::Exact(v) => Some(v.to_complex::<f64>()),
            Point::Algebraic(a) => Some(a.approx.center()),
        }
    }

    pub fn disk(&self) -> Option<ComplexApprox> {
        match self {
            Point::Infinity => None,
            Point::Exact(v) => {
                let z = v.to_complex::<f64>();
                Some(ComplexApprox::new(z, z.norm() * 4.0 * f64::EPSILON))
            }
            Point::Algebraic(a) => Some(a.approx),
        }
    }

    /// The root of `poly` (square-free) isolated by `approx`, exact when
    /// that root lies in K. `radicand` names the quadratic field in use when
    /// the polynomial itself is rational.
    pub fn from_root(poly: &Poly<K>, approx: ComplexApprox, radicand: Option<&BigInt>) -> Self {
        let poly = poly.monic();
        if poly.deg() == 1 {
            return Point::Exact(-poly.coeff(0));
        }
        match exact_root(&poly, &approx, radicand) {
            Some(v) => Point::Exact(v),
            None => Point::Algebraic(AlgPoint { poly, approx }),
        }
    }

    /// The root of `poly` nearest to `value`.
    pub fn locate(
        poly: &Poly<K>,
        value: Complex<f64>,
        bits: u32,
        radicand: Option<&BigInt>,
    ) -> Result<Self> {
        Locator::new(poly, bits)?.locate(value, radicand)
    }

    /// f at every root of the square-free `s` (given by their disks); the
    /// conjugate images share one value polynomial.
    pub fn images_of_roots(
        s: &Poly<K>,
        disks: &[ComplexApprox],
        f: &RatFunc<K>,
        bits: u32,
    ) -> Result<Vec<Self>> {
        if s.deg() <= 1 || !s.gcd(f.den()).is_constant() || disks.len() < 2 {
            let tag = radicand_of(f);
            return disks
                .iter()
                .map(|d| Point::from_root(s, *d, tag.as_ref()).image(f, bits))
                .collect();
        }
        let loc = Locator::new(&value_poly(s, f), bits)?;
        let tag = radicand_of(f);
        disks
            .iter()
            .map(|d| {
                let fz = eval_f64(f, d.center());
                if !(fz.re.is_finite() && fz.im.is_finite()) {
                    return Err(Error::Precision(
                        "image of an algebraic point overflowed".into(),
                    ));
                }
                loc.locate(fz, tag.as_ref())
            })
            .collect()
    }

    /// f(self).
    pub fn image(&self, f: &RatFunc<K>, bits: u32) -> Result<Self> {
        match self {
            Point::Infinity => Ok(Point::from_proj(&f.value_at_infinity())),
            Point::Exact(v) => Ok(Point::from_proj(&f.eval(&ProjPoint::Finite(v.clone())))),
            Point::Algebraic(a) => {
                let z = a.approx.center();
                let pole_part = a.poly.gcd(f.den());
                let mut s = a.poly.clone();
                if !pole_part.is_constant() {
                    if contains_root_of(&pole_part, &a.approx, bits)? {
                        return Ok(Point::Infinity);
                    }
                    s = s.exact_div(&pole_part);
                }
                let v = value_poly(&s, f);
                let fz = eval_f64(f, z);
                if !(fz.re.is_finite() && fz.im.is_finite()) {
                    return Err(Error::Precision(
                        "image of an algebraic point overflowed".into(),
                    ));
                }
                Self::locate(&v, fz, bits, radicand_of(f).as_ref())
            }
        }
    }

    /// m(self) for a Möbius map m.
    pub fn mobius_image(&self, m: &Mobius<K>, bits: u32) -> Result<Self> {
        match self {
            Point::Algebraic(a) => {
                let [ma, mb, mc, md] = m.coefficients();
                // roots of s∘m⁻¹, m⁻¹(w) = (d·w − b)/(−c·w + a)
                let num = Poly::new(vec![-mb.clone(), md.clone()]);
                let den = Poly::new(vec![ma.clone(), -mc.clone()]);
                let t = a.poly.homogenize_at(&num, &den, a.poly.deg());
                let z = a.approx.center();
                let (ca, cb, cc, cd) = (
                    ma.to_complex::<f64>(),
                    mb.to_complex::<f64>(),
                    mc.to_complex::<f64>(),
                    md.to_complex::<f64>(),
                );
                let den_v = cc * z + cd;
                if den_v.norm() < 1e-300 {
                    return Ok(Point::Infinity);
                }
                let tag = crate::funcalg::poly::merge_tags(
                    [ma, mb, mc, md].into_iter().map(|c| c.field_tag()),
                )
                .ok()
                .flatten();
                Self::locate(&t, (ca * z + cb) / den_v, bits, tag.as_ref())
            }
            _ => Ok(Point::from_proj(
                &m.apply(&self.to_proj().expect("exact point")),
            )),
        }
    }

    /// Equality of the underlying points of the sphere.
    pub fn same(&self, other: &Self, bits: u32) -> Result<bool> {
        match (self, other) {
            (Point::Infinity, Point::Infinity) => Ok(true),
            (Point::Infinity, _) | (_, Point::Infinity) => Ok(false),
            (Point::Exact(a), Point::Exact(b)) => Ok(a == b),
            (Point::Exact(v), Point::Algebraic(a)) | (Point::Algebraic(a), Point::Exact(v)) => {
                if !a.poly.eval(v).is_zero() {
                    return Ok(false);
                }
                let z = v.to_complex::<f64>();
                Ok((z - a.approx.center()).norm()
                    <= a.approx.radius + 8.0 * f64::EPSILON * (1.0 + z.norm()))
            }
            (Point::Algebraic(a), Point::Algebraic(b)) => {
                if !a.approx.overlaps(&b.approx) {
                    return Ok(false);
                }
                if a.poly == b.poly {
                    return Ok(true);
                }
                let g = a.poly.gcd(&b.poly);
                if g.is_constant() {
                    return Ok(false);
                }
                for r in roots_squarefree(&g, bits)? {
                    if r.overlaps(&a.approx) && r.overlaps(&b.approx) {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }

    /// Deterministic order: finite points by (re, im), then ∞.
    pub fn order_key(&self) -> (u8, f64, f64) {
        match self.approx() {
            None => (1, 0.0, 0.0),
            Some(z) => (0, z.re, z.im),
        }
    }

    pub fn cmp_key(&self, other: &Self) -> Ordering {
        let (a, b) = (self.order_key(), other.order_key());
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    }

    pub fn to_expr(&self) -> String {
        match self {
            Point::Infinity => "inf".to_string(),
            Point::Exact(v) => v.to_expr(),
            Point::Algebraic(a) => {
                let im = fmt_f64(a.approx.im);
                let sign = if im.starts_with('-') { "" } else { "+" };
                format!("minpoly:{}@{}{}{}i", a.poly, fmt_f64(a.approx.re), sign, im)
            }
        }
    }
}

fn fmt_f64(x: f64) -> String {
    let r = (x * 1e9).round() / 1e9;
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

impl<K: Field> fmt::Display for Point<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr())
    }
}

impl<K: Field> fmt::Debug for Point<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({})", self.to_expr())
    }
}

/// The radicand of the quadratic field f is defined over, if any.
pub fn radicand_of<K: Field>(f: &RatFunc<K>) -> Option<BigInt> {
    f.field_tag().ok().flatten()
}

/// f(z) in f64; ∞ comes back as a non-finite value.
pub fn eval_f64<K: Field>(f: &RatFunc<K>, z: Complex<f64>) -> Complex<f64> {
    let ev = |p: &Poly<K>| {
        p.coeffs()
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, c| {
                acc * z + c.to_complex::<f64>()
            })
    };
    ev(f.num()) / ev(f.den())
}

/// Whether the root isolated by `disk` is a root of `g`.
fn contains_root_of<K: Field>(g: &Poly<K>, disk: &ComplexApprox, bits: u32) -> Result<bool> {
    Ok(roots_squarefree(&g.squarefree_part(), bits)?
        .iter()
        .any(|r| r.overlaps(disk)))
}

/// V(w) = Res_z(s(z), P(z) − w·Q(z)), whose roots are the values of f = P/Q
/// at the roots of s (none of which may be a pole). Built by interpolation
/// at w = 0, 1, …, deg s.
pub fn value_poly<K: Field>(s: &Poly<K>, f: &RatFunc<K>) -> Poly<K> {
    let m = s.deg();
    let xs: Vec<K> = (0..=m as i64).map(K::from_int).collect();
    let ys: Vec<K> = xs
        .iter()
        .map(|w| s.resultant(&(f.num() - &f.den().scale(w))))
        .collect();
    interpolate(&xs, &ys)
}

/// Newton-form interpolation through (xs[i], ys[i]).
pub fn interpolate<K: Field>(xs: &[K], ys: &[K]) -> Poly<K> {
    let n = xs.len();
    let mut coef: Vec<K> = ys.to_vec();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (coef[i].clone() - coef[i - 1].clone()) / (xs[i].clone() - xs[i - j].clone());
        }
    }
    let mut out = Poly::constant(coef[n - 1].clone());
    for i in (0..n - 1).rev() {
        out = &(&out * &Poly::linear_root(xs[i].clone())) + &Poly::constant(coef[i].clone());
    }
    out
}

/// Leading coefficient of the primitive integer multiple of a rational
/// polynomial.
fn primitive_lc(p: &Poly<Rational>) -> BigInt {
    let mut den = BigInt::one();
    for c in p.coeffs() {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
    (ints.last().expect("nonzero polynomial") / content).abs()
}

/// The certified roots of a square-free part, for locating points by value.
struct Locator<K: Field> {
    sf: Poly<K>,
    roots: Vec<ComplexApprox>,
}

impl<K: Field> Locator<K> {
    fn new(poly: &Poly<K>, bits: u32) -> Result<Self> {
        let sf = poly.squarefree_part();
        if sf.is_constant() {
            return Err(Error::Inconsistent(
                "locating a point on a constant polynomial".into(),
            ));
        }
        let roots = roots_squarefree(&sf, bits)?;
        Ok(Locator { sf, roots })
    }

    fn locate(&self, value: Complex<f64>, radicand: Option<&BigInt>) -> Result<Point<K>> {
        let mut order: Vec<(f64, usize)> = self
            .roots
            .iter()
            .enumerate()
            .map(|(i, r)| ((r.center() - value).norm(), i))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        if order.len() > 1 && order[1].0 < 4.0 * order[0].0 {
            return Err(Error::Precision(format!(
                "value {value} is not clearly nearer one root than another"
            )));
        }
        Ok(Point::from_root(&self.sf, self.roots[order[0].1], radicand))
    }
}

/// The root of `s` isolated by `disk`, when it lies in K.
fn exact_root<K: Field>(s: &Poly<K>, disk: &ComplexApprox, radicand: Option<&BigInt>) -> Option<K> {
    let own = s.field_tag().ok()?;
    let norm = match &own {
        None => s.to_rational()?,
        Some(_) => (s * &s.galois_conjugate()).to_rational()?,
    };
    let tag = own.or_else(|| radicand.cloned());
    let l = primitive_lc(&norm).to_f64()?;
    if l > 2f64.powi(40) {
        return None;
    }
    let z = disk.center();
    let slack = disk.radius + 1e-9 * (1.0 + z.norm());
    let mut cands: Vec<(f64, f64)> = Vec::new();
    match &tag {
        None => {
            if z.im.abs() <= slack {
                cands.push((z.re, 0.0));
            }
        }
        Some(d) if d.is_negative() => {
            let rd = (-d.to_f64()?).sqrt();
            cands.push((z.re, z.im / rd));
        }
        Some(d) => {
            if z.im.abs() > slack {
                return None;
            }
            let rd = d.to_f64()?.sqrt();
            let conj = s.galois_conjugate();
            for w in roots_squarefree(&conj, 64).ok()? {
                if w.im.abs() <= w.radius + 1e-9 * (1.0 + w.re.abs()) {
                    cands.push(((z.re + w.re) / 2.0, (z.re - w.re) / (2.0 * rd)));
                }
            }
        }
    }
    let d = tag.unwrap_or_else(BigInt::one);
    let two_l = 2.0 * l;
    for (a, b) in cands {
        let (na, nb) = ((a * two_l).round(), (b * two_l).round());
        if !(na.abs() < 2f64.powi(52) && nb.abs() < 2f64.powi(52)) {
            continue;
        }
        let den = BigInt::from(two_l as i64);
        let qa = Rational::new(BigInt::from(na as i64), den.clone());
        let qb = Rational::new(BigInt::from(nb as i64), den);
        let Some(v) = K::from_parts(qa, qb, &d) else {
            continue;
        };
        if s.eval(&v).is_zero() {
            let vz = v.to_complex::<f64>();
            if (vz - z).norm() <= slack {
                return Some(v);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::field::{int, rat};
    use crate::funcalg::{parse, Scalar};

    type P = Poly<Rational>;

    #[test]
    fn exact_extraction_from_rational_polys() {
        let p = P::from_ints(&[3, 4]).monic();
        let pt = Point::from_root(
            &p,
            ComplexApprox::new(Complex::new(-0.75, 0.0), 1e-15),
            None,
        );
        assert!(matches!(pt, Point::Exact(ref v) if *v == rat(-3, 4)));
        // 49z² − 81: root 9/7
        let q = P::from_ints(&[-81, 0, 49]);
        let r = roots_squarefree(&q, 64).unwrap();
        let pts: Vec<_> = r.iter().map(|a| Point::from_root(&q, *a, None)).collect();
        assert!(pts.iter().all(|p| p.exact().is_some()));
    }

    #[test]
    fn quadratic_irrationals_are_exact_over_their_field() {
        // 4z² − 3 over ℚ(√3): roots ±√3/2
        let f = parse("4*sqrt(3)*z^2 - 3*sqrt(3)").unwrap();
        let s = f.num().monic();
        let d = BigInt::from(3);
        let r = roots_squarefree(&s, 64).unwrap();
        for a in r {
            let p = Point::from_root(&s, a, Some(&d));
            let v = p.exact().expect("±√3/2 is exact").clone();
            assert_eq!(v.clone() * v, Scalar::from_rational(rat(3, 4)));
        }
        // over ℚ the same roots stay algebraic
        let s = P::from_ints(&[-3, 0, 4]).monic();
        let r = roots_squarefree(&s, 64).unwrap();
        assert!(matches!(
            Point::from_root(&s, r[0], None),
            Point::Algebraic(_)
        ));
    }

    #[test]
    fn algebraic_identity() {
        let s = P::from_ints(&[1, 0, 1]);
        let t = &s * &P::from_ints(&[-2, 1]);
        let rs = roots_squarefree(&s, 64).unwrap();
        let rt = roots_squarefree(&t, 64).unwrap();
        let a = Point::from_root(&s, rs[0], None);
        let hits = rt
            .iter()
            .filter(|r| Point::from_root(&t, **r, None).same(&a, 64).unwrap())
            .count();
        assert_eq!(hits, 1);
        assert!(!a.same(&Point::Exact(int(2)), 64).unwrap());
        assert!(Point::Exact(int(2))
            .same(
                &Point::from_root(
                    &t,
                    *rt.iter().find(|r| (r.re - 2.0).abs() < 1e-9).unwrap(),
                    None
                ),
                64
            )
            .unwrap());
    }

    #[test]
    fn images_of_algebraic_points() {
        // i ↦ i² = −1
        let s = P::from_ints(&[1, 0, 1]);
        let r = roots_squarefree(&s, 64).unwrap();
        let sq = RatFunc::from_poly(P::from_ints(&[0, 0, 1]));
        for a in r {
            let img = Point::from_root(&s, a, None).image(&sq, 64).unwrap();
            assert!(matches!(img, Point::Exact(ref v) if *v == int(-1)));
        }
        // a root of z² + 1 is a pole of 1/(z² + 1)
        let inv = RatFunc::new(P::one(), s.clone()).unwrap();
        let img = Point::from_root(&s, roots_squarefree(&s, 64).unwrap()[0], None)
            .image(&inv, 64)
            .unwrap();
        assert!(img.is_infinite());
        // golden ratio φ ↦ φ² = φ + 1
        let g = P::from_ints(&[-1, -1, 1]);
        let phi = roots_squarefree(&g, 64)
            .unwrap()
            .into_iter()
            .find(|a| a.re > 0.0)
            .unwrap();
        let img = Point::from_root(&g, phi, None).image(&sq, 64).unwrap();
        let shifted = Point::from_root(&g, phi, None)
            .image(&RatFunc::from_poly(P::from_ints(&[1, 1])), 64)
            .unwrap();
        assert!(img.same(&shifted, 64).unwrap());
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        let p = P::from_ints(&[5, -3, 0, 2]);
        let xs: Vec<Rational> = (0..4).map(int).collect();
        let ys: Vec<Rational> = xs.iter().map(|x| p.eval(x)).collect();
        assert_eq!(interpolate(&xs, &ys), p);
    }
}
