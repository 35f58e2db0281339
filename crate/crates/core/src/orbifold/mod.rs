//! Orbifolds on the sphere and the local calculus of maps between them.

pub mod point;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use crate::analytic::critical::{push_unique, MapData};
use crate::error::{Error, Result};
use crate::funcalg::{Field, Mobius, Rational};
pub use point::{AlgPoint, Point};

/// A ramification function ν on the sphere, given by its marks (ν ≥ 2).
#[derive(Clone, Debug)]
pub struct Orbifold<K: Field> {
    marks: Vec<(Point<K>, u64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MapKind {
    NotHolomorphic,
    Holomorphic,
    MinimalHolomorphic,
    Covering,
}

#[derive(Serialize)]
struct MarkJson {
    point: String,
    nu: u64,
}

#[derive(Serialize)]
pub struct OrbifoldJson {
    marks: Vec<MarkJson>,
}

impl<K: Field> Orbifold<K> {
    pub fn empty() -> Self {
        Orbifold { marks: Vec::new() }
    }

    /// A good orbifold from its marks; rejects ν < 2, repeated points and
    /// bad orbifolds.
    pub fn new(marks: Vec<(Point<K>, u64)>, bits: u32) -> Result<Self> {
        let o = Self::unchecked(marks, bits)?;
        if !o.is_good() {
            return Err(Error::BadOrbifold(format!(
                "signature {:?} is not good",
                o.signature()
            )));
        }
        Ok(o)
    }

    /// Marks validated for ν ≥ 2 and distinctness, goodness not enforced.
    pub fn unchecked(marks: Vec<(Point<K>, u64)>, bits: u32) -> Result<Self> {
        let mut pts: Vec<Point<K>> = Vec::new();
        for (p, nu) in &marks {
            if *nu < 2 {
                return Err(Error::BadOrbifold(format!("mark at {p} has nu = {nu} < 2")));
            }
            if !push_unique(&mut pts, p.clone(), bits)? {
                return Err(Error::BadOrbifold(format!("point {p} marked twice")));
            }
        }
        let mut marks = marks;
        marks.sort_by(|a, b| a.0.cmp_key(&b.0));
        Ok(Orbifold { marks })
    }

    /// Marks at exact points (never ambiguous).
    pub fn exact(marks: Vec<(Point<K>, u64)>) -> Result<Self> {
        Self::new(marks, 64)
    }

    pub fn marks(&self) -> &[(Point<K>, u64)] {
        &self.marks
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }

    /// Sorted multiset of ν values.
    pub fn signature(&self) -> Vec<u64> {
        let mut s: Vec<u64> = self.marks.iter().map(|m| m.1).collect();
        s.sort_unstable();
        s
    }

    /// Not exactly one mark, and not exactly two marks with different ν.
    pub fn is_good(&self) -> bool {
        match self.marks.len() {
            1 => false,
            2 => self.marks[0].1 == self.marks[1].1,
            _ => true,
        }
    }

    pub fn nu(&self, p: &Point<K>, bits: u32) -> Result<u64> {
        for (q, nu) in &self.marks {
            if q.same(p, bits)? {
                return Ok(*nu);
            }
        }
        Ok(1)
    }

    /// χ = 2 + Σ (1/ν − 1).
    pub fn euler_char(&self) -> Rational {
        let mut chi = Rational::from_integer(BigInt::from(2));
        for (_, nu) in &self.marks {
            chi += Rational::new(BigInt::from(1), BigInt::from(*nu))
                - Rational::from_integer(BigInt::from(1));
        }
        chi
    }

    /// ν₁ | ν₂ at every point.
    pub fn preceq(&self, other: &Self, bits: u32) -> Result<bool> {
        for (p, nu) in &self.marks {
            if other.nu(p, bits)? % nu != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Same marks with the same ν.
    pub fn same(&self, other: &Self, bits: u32) -> Result<bool> {
        Ok(self.marks.len() == other.marks.len()
            && self.preceq(other, bits)?
            && other.preceq(self, bits)?)
    }

    /// The orbifold with every mark moved by m.
    pub fn transport(&self, m: &Mobius<K>, bits: u32) -> Result<Self> {
        let marks = self
            .marks
            .iter()
            .map(|(p, nu)| Ok((p.mobius_image(m, bits)?, *nu)))
            .collect::<Result<Vec<_>>>()?;
        Self::unchecked(marks, bits)
    }

    pub fn to_json(&self) -> OrbifoldJson {
        OrbifoldJson {
            marks: self
                .marks
                .iter()
                .map(|(p, nu)| MarkJson {
                    point: p.to_expr(),
                    nu: *nu,
                })
                .collect(),
        }
    }

    pub fn describe(&self) -> String {
        if self.marks.is_empty() {
            return "{}".to_string();
        }
        let parts: Vec<String> = self
            .marks
            .iter()
            .map(|(p, nu)| format!("{p}: {nu}"))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// The strongest of covering / minimal holomorphic / holomorphic that
/// f: o1 → o2 satisfies.
///
/// Only marks of o1, critical points of f and preimages of marks of o2 are
/// checked: elsewhere ν₁ = ν₂ = deg_z f = 1.
pub fn classify_map<K: Field>(
    md: &MapData<K>,
    o1: &Orbifold<K>,
    o2: &Orbifold<K>,
) -> Result<MapKind> {
    let bits = md.bits;
    let mut support: Vec<Point<K>> = Vec::new();
    for (p, _) in o1.marks() {
        push_unique(&mut support, p.clone(), bits)?;
    }
    for c in &md.critical {
        push_unique(&mut support, c.point.clone(), bits)?;
    }
    for (w, _) in o2.marks() {
        for (z, _) in md.fiber(w)? {
            push_unique(&mut support, z, bits)?;
        }
    }
    let mut kind = MapKind::Covering;
    for z in &support {
        let n1 = o1.nu(z, bits)?;
        let d = md.local_degree(z)? as u64;
        let n2 = o2.nu(&md.image(z)?, bits)?;
        let here = if n2 == n1 * d {
            MapKind::Covering
        } else if n2 == n1 * d.gcd(&n2) {
            MapKind::MinimalHolomorphic
        } else if (n1 * d).is_multiple_of(n2) {
            MapKind::Holomorphic
        } else {
            MapKind::NotHolomorphic
        };
        kind = kind.min(here);
    }
    Ok(kind)
}

/// O₂ᶠ alone: ν₂ is the lcm of local degrees over each critical value.
/// Needs only the critical data.
pub fn branch_orbifold<K: Field>(md: &MapData<K>) -> Result<Orbifold<K>> {
    let mut m2 = Vec::new();
    for w in md.critical_values()? {
        let nu2 = md
            .critical_over(&w)?
            .iter()
            .fold(1u64, |acc, (_, d)| acc.lcm(&(*d as u64)));
        m2.push((w, nu2));
    }
    Orbifold::unchecked(m2, md.bits)
}

/// (O₁ᶠ, O₂ᶠ): ν₂ is the lcm of local degrees over each point and
/// ν₁(z) = ν₂(f(z))/deg_z f.
pub fn canonical_orbifolds<K: Field>(md: &MapData<K>) -> Result<(Orbifold<K>, Orbifold<K>)> {
    let o2 = branch_orbifold(md)?;
    let targets: Vec<Point<K>> = o2.marks().iter().map(|(w, _)| w.clone()).collect();
    let mut m1 = Vec::new();
    for ((_, nu2), fiber) in o2.marks().iter().zip(md.fibers(&targets)?) {
        for (z, d) in fiber {
            let nu1 = nu2 / d as u64;
            if nu1 > 1 {
                m1.push((z, nu1));
            }
        }
    }
    Ok((Orbifold::unchecked(m1, md.bits)?, o2))
}

/// f*o and whether it is good.
pub fn pullback<K: Field>(md: &MapData<K>, o: &Orbifold<K>) -> Result<(Orbifold<K>, bool)> {
    let mut marks = Vec::new();
    for (w, nu) in o.marks() {
        for (z, d) in md.fiber(w)? {
            let v = nu / (d as u64).gcd(nu);
            if v > 1 {
                marks.push((z, v));
            }
        }
    }
    let out = Orbifold::unchecked(marks, md.bits)?;
    let good = out.is_good();
    Ok((out, good))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::field::{int, rat};
    use crate::funcalg::{chebyshev, Poly, RatFunc};

    type Q = RatFunc<Rational>;
    type O = Orbifold<Rational>;

    fn q(num: &[i64], den: &[i64]) -> Q {
        Q::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
    }

    fn orb(marks: &[(Option<i64>, u64)]) -> O {
        let m = marks
            .iter()
            .map(|(p, nu)| (p.map_or(Point::Infinity, Point::int), *nu))
            .collect();
        O::unchecked(m, 64).unwrap()
    }

    fn md(f: &Q) -> MapData<Rational> {
        MapData::new(f, 64).unwrap()
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(O::empty().euler_char(), int(2));
        assert_eq!(
            orb(&[(Some(0), 2), (Some(1), 3), (None, 7)]).euler_char(),
            rat(-1, 42)
        );
        assert_eq!(
            orb(&[(Some(0), 2), (Some(1), 2), (Some(2), 2), (None, 2)]).euler_char(),
            int(0)
        );
    }

    #[test]
    fn goodness_is_enforced() {
        assert!(matches!(
            O::exact(vec![(Point::int(0), 2)]),
            Err(Error::BadOrbifold(_))
        ));
        assert!(matches!(
            O::exact(vec![(Point::int(0), 2), (Point::Infinity, 3)]),
            Err(Error::BadOrbifold(_))
        ));
        assert!(O::exact(vec![(Point::int(0), 3), (Point::Infinity, 3)]).is_ok());
        assert!(matches!(
            O::exact(vec![(Point::int(0), 1), (Point::int(1), 1)]),
            Err(Error::BadOrbifold(_))
        ));
    }

    #[test]
    fn preceq_examples() {
        let a = orb(&[(Some(0), 2)]);
        let b = orb(&[(Some(0), 4), (None, 2)]);
        assert!(a.preceq(&b, 64).unwrap());
        assert!(!orb(&[(Some(0), 3)])
            .preceq(&orb(&[(Some(0), 2)]), 64)
            .unwrap());
    }

    #[test]
    fn classify_examples() {
        let a = q(&[0, 432, 144], &[81, -18, 1]);
        let o = orb(&[(Some(0), 2), (Some(-3), 2)]);
        assert_eq!(
            classify_map(&md(&a), &o, &o).unwrap(),
            MapKind::MinimalHolomorphic
        );
        let z3 = q(&[0, 0, 0, 1], &[1]);
        let o = orb(&[(Some(0), 2), (None, 2)]);
        assert_eq!(
            classify_map(&md(&z3), &o, &o).unwrap(),
            MapKind::MinimalHolomorphic
        );
        let z2 = q(&[0, 0, 1], &[1]);
        assert_eq!(
            classify_map(&md(&z2), &O::empty(), &o).unwrap(),
            MapKind::Covering
        );
        assert_eq!(
            classify_map(&md(&z2), &o, &O::empty()).unwrap(),
            MapKind::Holomorphic
        );
        assert_eq!(
            classify_map(&md(&z2), &o, &o).unwrap(),
            MapKind::Holomorphic
        );
    }

    #[test]
    fn hidden_critical_point_is_checked() {
        // z³ − 3z has critical points ±1 with values ∓2; with both sides
        // empty the map is holomorphic but not a covering because of them
        let f = q(&[0, -3, 0, 1], &[1]);
        assert_eq!(
            classify_map(&md(&f), &O::empty(), &O::empty()).unwrap(),
            MapKind::MinimalHolomorphic
        );
        let o2 = orb(&[(Some(2), 2), (Some(-2), 2), (None, 3)]);
        let (o1, _) = pullback(&md(&f), &o2).unwrap();
        assert_eq!(classify_map(&md(&f), &o1, &o2).unwrap(), MapKind::Covering);
    }

    #[test]
    fn canonical_pairs() {
        let z5 = q(&[0, 0, 0, 0, 0, 1], &[1]);
        let (_, o2) = canonical_orbifolds(&md(&z5)).unwrap();
        assert!(o2.same(&orb(&[(Some(0), 5), (None, 5)]), 64).unwrap());
        let t4: Q = chebyshev(4);
        let (o1, o2) = canonical_orbifolds(&md(&t4)).unwrap();
        assert!(o2
            .same(&orb(&[(Some(-1), 2), (Some(1), 2), (None, 4)]), 64)
            .unwrap());
        assert_eq!(classify_map(&md(&t4), &o1, &o2).unwrap(), MapKind::Covering);
        let at = q(&[0, 48], &[9, 24, 16]);
        let (_, o2) = canonical_orbifolds(&md(&at)).unwrap();
        assert!(o2.same(&orb(&[(Some(1), 2), (None, 2)]), 64).unwrap());
    }

    #[test]
    fn pullback_examples() {
        let z2 = q(&[0, 0, 1], &[1]);
        let (p, good) = pullback(&md(&z2), &orb(&[(Some(0), 4), (None, 4)])).unwrap();
        assert!(good);
        assert!(p.same(&orb(&[(Some(0), 2), (None, 2)]), 64).unwrap());
        let (p, _) = pullback(&md(&z2), &orb(&[(Some(1), 3), (Some(-1), 3)])).unwrap();
        assert_eq!(p.signature(), vec![3, 3, 3, 3]);
        let exact: Vec<_> = p
            .marks()
            .iter()
            .filter_map(|m| m.0.exact().cloned())
            .collect();
        assert_eq!(exact, vec![int(-1), int(1)]);
        // bad results are flagged, not rejected
        let (p, good) = pullback(&md(&z2), &orb(&[(Some(1), 2), (Some(4), 2)])).unwrap();
        assert!(good && p.signature() == vec![2, 2, 2, 2]);
        let (p, good) = pullback(&md(&z2), &orb(&[(Some(0), 2), (None, 4)])).unwrap();
        assert_eq!(p.signature(), vec![2]);
        assert!(!good);
    }
}
