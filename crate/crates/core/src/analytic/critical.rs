//! Critical points, local degrees, critical values and fibers of a rational map.

use super::roots::{roots_squarefree, ComplexApprox};
use crate::error::{Error, Result};
use crate::funcalg::{Field, Poly, ProjPoint, RatFunc};
use crate::orbifold::point::{eval_f64, radicand_of, Point};

/// A minimal polynomial, its roots, and the fiber over all of them with each
/// preimage tagged by the index of the root it maps to.
/// Points of a fiber with their local degrees.
pub type Fiber<K> = Vec<(Point<K>, usize)>;

type ConjugateFibers<K> = (Poly<K>, Vec<ComplexApprox>, Vec<(Point<K>, usize, usize)>);

#[derive(Clone, Debug)]
pub struct CriticalDatum<K: Field> {
    pub point: Point<K>,
    pub local_degree: usize,
    pub value: Point<K>,
}

/// Local degree of f at ∞.
pub fn degree_at_infinity<K: Field>(f: &RatFunc<K>) -> usize {
    let (dn, dd) = (f.num().deg(), f.den().deg());
    match f.value_at_infinity() {
        ProjPoint::Infinity => dn - dd,
        ProjPoint::Finite(c) => {
            let h = f.num() - &f.den().scale(&c);
            dd - h.degree().unwrap_or(0)
        }
    }
}

/// Every critical point with its local degree and critical value, sorted
/// by point. Σ (local degree − 1) = 2·deg f − 2.
pub fn critical_data<K: Field>(f: &RatFunc<K>, bits: u32) -> Result<Vec<CriticalDatum<K>>> {
    let mut out = Vec::new();
    if f.degree() < 2 {
        return Ok(out);
    }
    let cr = f.critical_numerator();
    let tag = radicand_of(f);
    if cr.degree().is_some() {
        for (factor, mult) in cr.squarefree_decomposition() {
            let disks = roots_squarefree(&factor, bits)?;
            let values = Point::images_of_roots(&factor, &disks, f, bits)?;
            for (approx, value) in disks.into_iter().zip(values) {
                let point = Point::from_root(&factor, approx, tag.as_ref());
                out.push(CriticalDatum {
                    point,
                    local_degree: mult + 1,
                    value,
                });
            }
        }
    }
    let e = degree_at_infinity(f);
    if e >= 2 {
        let value = Point::from_proj(&f.value_at_infinity());
        out.push(CriticalDatum {
            point: Point::Infinity,
            local_degree: e,
            value,
        });
    }
    out.sort_by(|a, b| a.point.cmp_key(&b.point));
    let total: usize = out.iter().map(|c| c.local_degree - 1).sum();
    if total != 2 * f.degree() - 2 {
        return Err(Error::Inconsistent(format!(
            "critical multiplicities sum to {total}, expected {}",
            2 * f.degree() - 2
        )));
    }
    Ok(out)
}

/// A map with its critical data, answering local questions about it.
#[derive(Clone, Debug)]
pub struct MapData<K: Field> {
    pub f: RatFunc<K>,
    pub critical: Vec<CriticalDatum<K>>,
    pub bits: u32,
}

impl<K: Field> MapData<K> {
    pub fn new(f: &RatFunc<K>, bits: u32) -> Result<Self> {
        Ok(MapData {
            f: f.clone(),
            critical: critical_data(f, bits)?,
            bits,
        })
    }

    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    pub fn local_degree(&self, z: &Point<K>) -> Result<usize> {
        for c in &self.critical {
            if c.point.same(z, self.bits)? {
                return Ok(c.local_degree);
            }
        }
        Ok(1)
    }

    pub fn image(&self, z: &Point<K>) -> Result<Point<K>> {
        for c in &self.critical {
            if c.point.same(z, self.bits)? {
                return Ok(c.value.clone());
            }
        }
        z.image(&self.f, self.bits)
    }

    /// Distinct critical values, sorted.
    pub fn critical_values(&self) -> Result<Vec<Point<K>>> {
        let mut vals: Vec<Point<K>> = Vec::new();
        for c in &self.critical {
            push_unique(&mut vals, c.value.clone(), self.bits)?;
        }
        vals.sort_by(|a, b| a.cmp_key(b));
        Ok(vals)
    }

    /// Critical points over w with their local degrees.
    pub fn critical_over(&self, w: &Point<K>) -> Result<Vec<(Point<K>, usize)>> {
        let mut out = Vec::new();
        for c in &self.critical {
            if c.value.same(w, self.bits)? {
                out.push((c.point.clone(), c.local_degree));
            }
        }
        Ok(out)
    }

    /// The full fiber f⁻¹(w) with local degrees (summing to deg f).
    pub fn fiber(&self, w: &Point<K>) -> Result<Vec<(Point<K>, usize)>> {
        Ok(self.fibers(std::slice::from_ref(w))?.remove(0))
    }

    /// Fibers over several points. Galois-conjugate algebraic points share
    /// one resultant, whose roots are computed once and split by image.
    pub fn fibers(&self, ws: &[Point<K>]) -> Result<Vec<Fiber<K>>> {
        let f = &self.f;
        let n = f.degree();
        let at_inf = Point::from_proj(&f.value_at_infinity());
        let mut shared: Vec<ConjugateFibers<K>> = Vec::new();
        let mut all = Vec::with_capacity(ws.len());
        for w in ws {
            let mut out: Vec<(Point<K>, usize)> = Vec::new();
            if at_inf.same(w, self.bits)? {
                out.push((Point::Infinity, degree_at_infinity(f)));
            }
            match w {
                Point::Infinity => self.push_roots(&mut out, f.den())?,
                Point::Exact(c) => {
                    let h = f.num() - &f.den().scale(c);
                    self.push_roots(&mut out, &h)?;
                }
                Point::Algebraic(a) => {
                    let k = match shared.iter().position(|e| e.0 == a.poly) {
                        Some(k) => k,
                        None => {
                            shared.push(self.conjugate_fibers(&a.poly)?);
                            shared.len() - 1
                        }
                    };
                    let (_, conj, pts) = &shared[k];
                    let target = conj
                        .iter()
                        .position(|r| r.overlaps(&a.approx))
                        .ok_or_else(|| Error::Precision("algebraic point lost its root".into()))?;
                    out.extend(
                        pts.iter()
                            .filter(|p| p.2 == target)
                            .map(|p| (p.0.clone(), p.1)),
                    );
                }
            }
            let total: usize = out.iter().map(|x| x.1).sum();
            if total != n {
                return Err(Error::Precision(format!(
                    "fiber degrees sum to {total}, expected {n}"
                )));
            }
            out.sort_by(|a, b| a.0.cmp_key(&b.0));
            all.push(out);
        }
        Ok(all)
    }

    fn conjugate_fibers(&self, m: &Poly<K>) -> Result<ConjugateFibers<K>> {
        let f = &self.f;
        let h = m.homogenize_at(f.num(), f.den(), m.deg());
        let conj = roots_squarefree(m, self.bits)?;
        let mut pts = Vec::new();
        self.push_roots(&mut pts, &h)?;
        let mut tagged = Vec::with_capacity(pts.len());
        for (z, d) in pts {
            let Some(zc) = z.approx() else { continue };
            let v = eval_f64(f, zc);
            let nearest = conj
                .iter()
                .enumerate()
                .min_by(|x, y| {
                    (x.1.center() - v)
                        .norm()
                        .total_cmp(&(y.1.center() - v).norm())
                })
                .map(|x| x.0)
                .ok_or_else(|| Error::Inconsistent("minimal polynomial without roots".into()))?;
            tagged.push((z, d, nearest));
        }
        Ok((m.clone(), conj, tagged))
    }

    fn push_roots(&self, out: &mut Vec<(Point<K>, usize)>, h: &Poly<K>) -> Result<()> {
        if h.is_constant() {
            return Ok(());
        }
        let tag = radicand_of(&self.f);
        for (factor, mult) in h.squarefree_decomposition() {
            for approx in roots_squarefree(&factor, self.bits)? {
                out.push((Point::from_root(&factor, approx, tag.as_ref()), mult));
            }
        }
        Ok(())
    }
}

pub fn push_unique<K: Field>(v: &mut Vec<Point<K>>, p: Point<K>, bits: u32) -> Result<bool> {
    for q in v.iter() {
        if q.same(&p, bits)? {
            return Ok(false);
        }
    }
    v.push(p);
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::field::{int, rat};
    use crate::funcalg::{chebyshev, Rational};

    type Q = RatFunc<Rational>;

    fn q(num: &[i64], den: &[i64]) -> Q {
        Q::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
    }

    fn exact(p: &Point<Rational>) -> Rational {
        p.exact().cloned().expect("exact point")
    }

    #[test]
    fn squaring() {
        let cd = critical_data(&q(&[0, 0, 1], &[1]), 64).unwrap();
        assert_eq!(cd.len(), 2);
        assert_eq!(exact(&cd[0].point), int(0));
        assert_eq!(cd[0].local_degree, 2);
        assert_eq!(exact(&cd[0].value), int(0));
        assert!(cd[1].point.is_infinite() && cd[1].value.is_infinite());
        assert_eq!(cd[1].local_degree, 2);
    }

    #[test]
    fn conjugated_example() {
        let cd = critical_data(&q(&[0, 48], &[9, 24, 16]), 64).unwrap();
        assert_eq!(cd.len(), 2);
        assert_eq!(exact(&cd[0].point), rat(-3, 4));
        assert!(cd[0].value.is_infinite());
        assert_eq!(exact(&cd[1].point), rat(3, 4));
        assert_eq!(exact(&cd[1].value), int(1));
        assert!(cd.iter().all(|c| c.local_degree == 2));
    }

    #[test]
    fn original_example_has_critical_point_over_minus_three() {
        let a = q(&[0, 432, 144], &[81, -18, 1]);
        let cd = critical_data(&a, 64).unwrap();
        assert!(cd.iter().any(|c| c.point.exact() == Some(&rat(-9, 7))
            && c.local_degree == 2
            && c.value.exact() == Some(&int(-3))));
    }

    #[test]
    fn riemann_hurwitz_for_chebyshev() {
        for n in 2..7 {
            let t: Q = chebyshev(n);
            let cd = critical_data(&t, 64).unwrap();
            let s: usize = cd.iter().map(|c| c.local_degree - 1).sum();
            assert_eq!(s, 2 * n - 2);
        }
    }

    #[test]
    fn fibers() {
        let md = MapData::new(&q(&[0, 0, 1], &[1]), 64).unwrap();
        let fib = md.fiber(&Point::Exact(int(-1))).unwrap();
        assert_eq!(fib.len(), 2);
        assert!(fib
            .iter()
            .all(|(p, d)| *d == 1 && matches!(p, Point::Algebraic(_))));
        let fib = md.fiber(&Point::Infinity).unwrap();
        assert_eq!(fib.len(), 1);
        assert_eq!(fib[0].1, 2);
        // the fiber over i is the pair of square roots of i
        let s = Poly::<Rational>::from_ints(&[1, 0, 1]);
        let i = roots_squarefree(&s, 64)
            .unwrap()
            .into_iter()
            .find(|a| a.im > 0.0)
            .unwrap();
        let fib = md.fiber(&Point::from_root(&s, i, None)).unwrap();
        assert_eq!(fib.len(), 2);
        for (p, _) in &fib {
            let z = p.approx().unwrap();
            assert!((z * z - num_complex::Complex::new(0.0, 1.0)).norm() < 1e-12);
        }
    }
}
