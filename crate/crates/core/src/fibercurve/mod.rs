//! Monodromy and fiber-product components.
//!
//! Components of {f(x) = g(y)} are the orbits of the simultaneous monodromy
//! action on sheet pairs (i, j); the genus of each follows from
//! Riemann–Hurwitz on the orbit.

pub mod perm;

use num_bigint::BigUint;
use num_complex::Complex;
use num_rational::Ratio;
use serde::Serialize;

use crate::analytic::critical::{push_unique, MapData};
use crate::analytic::track::{fiber_at, track, track_all, LoopSystem};
use crate::error::{Error, Result};
use crate::funcalg::{Field, Poly, ProjPoint, RatFunc, Rational};
use crate::orbifold::{branch_orbifold, Point};
pub use perm::{group_order, is_transitive, orbits, Perm};

/// Largest map degree whose monodromy is computed.
pub const MONODROMY_DEGREE_CAP: usize = 512;

/// Rungs tried for a monodromy computation whose permutations disagree with
/// the exact critical data.
const LADDER: [u32; 4] = [64, 128, 256, 512];

#[derive(Clone, Debug)]
pub struct MonodromyData<K: Field> {
    pub map: RatFunc<K>,
    pub base: Complex<f64>,
    /// Branch values in loop order, ∞ (when branched) last.
    pub branch: Vec<Point<K>>,
    /// One permutation per branch value; their product in order is trivial.
    pub perms: Vec<Perm>,
    pub group_order: BigUint,
}

#[derive(Serialize)]
pub struct MonodromyJson {
    pub map: String,
    pub base: [f64; 2],
    pub branch: Vec<BranchJson>,
    pub group_order: String,
}

#[derive(Serialize)]
pub struct BranchJson {
    pub value: String,
    pub permutation: Perm,
}

impl<K: Field> MonodromyData<K> {
    pub fn to_json(&self) -> MonodromyJson {
        MonodromyJson {
            map: self.map.to_expr(),
            base: [self.base.re, self.base.im],
            branch: self
                .branch
                .iter()
                .zip(&self.perms)
                .map(|(v, p)| BranchJson {
                    value: v.to_expr(),
                    permutation: p.clone(),
                })
                .collect(),
            group_order: self.group_order.to_string(),
        }
    }
}

/// Monodromy of several maps over a common loop system.
struct Joint<K: Field> {
    base: Complex<f64>,
    /// Finite points in loop order, then ∞ when any map branches there.
    points: Vec<Point<K>>,
    /// perms[map][point].
    perms: Vec<Vec<Perm>>,
}

fn joint_monodromy<K: Field>(maps: &[&MapData<K>], bits: u32) -> Result<Joint<K>> {
    let mut last = Error::Tracking("no precision rung attempted".into());
    for rung in LADDER.into_iter().filter(|&b| b >= bits.min(512)) {
        match joint_at(maps, rung) {
            Ok(j) => return Ok(j),
            Err(e @ Error::Tracking(_)) => last = e,
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

fn joint_at<K: Field>(maps: &[&MapData<K>], bits: u32) -> Result<Joint<K>> {
    for md in maps {
        if md.degree() > MONODROMY_DEGREE_CAP {
            return Err(Error::Budget(format!(
                "monodromy of a degree {} map exceeds the cap {MONODROMY_DEGREE_CAP}",
                md.degree()
            )));
        }
    }
    let mut points: Vec<Point<K>> = Vec::new();
    for md in maps {
        for v in md.critical_values()? {
            push_unique(&mut points, v, bits)?;
        }
    }
    let has_inf = points.iter().any(Point::is_infinite);
    points.retain(|p| !p.is_infinite());
    points.sort_by(|a, b| a.cmp_key(b));
    let centers: Vec<Complex<f64>> = points
        .iter()
        .map(|p| p.approx().expect("finite point"))
        .collect();
    let mut extra: Vec<Point<K>> = Vec::new();
    for md in maps {
        if let ProjPoint::Finite(c) = md.f.value_at_infinity() {
            let p = Point::Exact(c);
            let mut known = false;
            for q in &points {
                known |= q.same(&p, bits)?;
            }
            if !known {
                push_unique(&mut extra, p, bits)?;
            }
        }
    }
    let obstacles: Vec<Complex<f64>> = extra
        .iter()
        .map(|p| p.approx().expect("finite point"))
        .collect();
    let ls = LoopSystem::new(&centers, &obstacles)?;
    let mut perms = Vec::with_capacity(maps.len());
    for md in maps {
        let start = fiber_at(&md.f, ls.base, bits)?;
        let raw = track_all(&md.f, &ls.loops, &start, bits)?;
        let raw: Vec<Perm> = raw
            .into_iter()
            .map(|p| {
                Perm::from_images(p)
                    .ok_or_else(|| Error::Tracking("tracked map is not a bijection".into()))
            })
            .collect::<Result<_>>()?;
        let outer = Perm::from_images(track(&md.f, &ls.outer, &start, bits)?.permutation)
            .ok_or_else(|| Error::Tracking("tracked map is not a bijection".into()))?;
        let n = md.degree();
        let mut product = Perm::identity(n);
        let mut ordered = Vec::with_capacity(raw.len() + 1);
        for &i in &ls.order {
            product = product.then(&raw[i]);
            ordered.push(raw[i].clone());
        }
        if product != outer {
            return Err(Error::Tracking(
                "loop relation fails: product of loops is not the outer loop".into(),
            ));
        }
        if has_inf {
            ordered.push(outer.inverse());
        } else if !outer.is_identity() {
            return Err(Error::Tracking(
                "nontrivial monodromy around an unbranched ∞".into(),
            ));
        }
        perms.push(ordered);
    }
    let mut ordered_points: Vec<Point<K>> = ls.order.iter().map(|&i| points[i].clone()).collect();
    if has_inf {
        ordered_points.push(Point::Infinity);
    }
    // every permutation must have the cycle type the exact critical data predicts
    for (md, ps) in maps.iter().zip(&perms) {
        for (t, p) in ordered_points.iter().zip(ps) {
            let mut expect: Vec<usize> = md.critical_over(t)?.iter().map(|x| x.1).collect();
            let ones = md.degree() - expect.iter().sum::<usize>();
            expect.extend(std::iter::repeat_n(1, ones));
            expect.sort_unstable();
            if p.cycle_type() != expect {
                return Err(Error::Tracking(format!(
                    "monodromy around {t} has cycle type {:?}, critical data predicts {expect:?}",
                    p.cycle_type()
                )));
            }
        }
    }
    Ok(Joint {
        base: ls.base,
        points: ordered_points,
        perms,
    })
}

pub fn monodromy<K: Field>(f: &RatFunc<K>, bits: u32) -> Result<MonodromyData<K>> {
    if f.degree() < 2 {
        return Err(Error::Precondition("monodromy needs deg f >= 2".into()));
    }
    let md = MapData::new(f, bits)?;
    monodromy_of(&md)
}

pub fn monodromy_of<K: Field>(md: &MapData<K>) -> Result<MonodromyData<K>> {
    let j = joint_monodromy(&[md], md.bits)?;
    let perms = j.perms.into_iter().next().expect("one map");
    let n = md.degree();
    if !is_transitive(n, &perms) {
        return Err(Error::Inconsistent(
            "monodromy group of a rational map is not transitive".into(),
        ));
    }
    Ok(MonodromyData {
        map: md.f.clone(),
        base: j.base,
        group_order: group_order(n, &perms),
        branch: j.points,
        perms,
    })
}

/// One irreducible component of {f(x) = g(y)}.
#[derive(Clone, Debug, Serialize)]
pub struct CurveComponent {
    /// Sheet pairs (i, j), zero-based, sorted.
    #[serde(skip)]
    pub orbit: Vec<(usize, usize)>,
    /// Degree of the projection to x.
    pub deg_p: usize,
    /// Degree of the projection to y.
    pub deg_q: usize,
    pub genus: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberDecomposition {
    pub n: usize,
    pub components: Vec<CurveComponent>,
}

impl FiberDecomposition {
    pub fn min_genus(&self) -> u64 {
        self.components.iter().map(|c| c.genus).min().unwrap_or(0)
    }
}

pub fn fiber_components<K: Field>(
    f: &RatFunc<K>,
    g: &RatFunc<K>,
    bits: u32,
) -> Result<FiberDecomposition> {
    if f.is_constant() || g.is_constant() {
        return Err(Error::Precondition(
            "fiber product needs nonconstant maps".into(),
        ));
    }
    f.common_tag(g)?;
    let (m, n) = (f.degree(), g.degree());
    if m == 1 || n == 1 {
        let orbit = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        return Ok(FiberDecomposition {
            n: 1,
            components: vec![CurveComponent {
                orbit,
                deg_p: n,
                deg_q: m,
                genus: 0,
            }],
        });
    }
    let mf = MapData::new(f, bits)?;
    let mg = MapData::new(g, bits)?;
    fiber_components_of(&mf, &mg)
}

pub fn fiber_components_of<K: Field>(
    mf: &MapData<K>,
    mg: &MapData<K>,
) -> Result<FiberDecomposition> {
    let (m, n) = (mf.degree(), mg.degree());
    let j = joint_monodromy(&[mf, mg], mf.bits.max(mg.bits))?;
    let pair: Vec<Perm> = j.perms[0]
        .iter()
        .zip(&j.perms[1])
        .map(|(a, b)| {
            let img = (0..m * n)
                .map(|k| a.apply(k / n) * n + b.apply(k % n))
                .collect();
            Perm::from_images(img).expect("product of bijections")
        })
        .collect();
    let mut components = Vec::new();
    for orbit in orbits(m * n, &pair) {
        let s = orbit.len();
        if s % m != 0 || s % n != 0 {
            return Err(Error::Inconsistent(format!(
                "component of size {s} is not a multiple of {m} and {n}"
            )));
        }
        let mut inside = vec![false; m * n];
        for &k in &orbit {
            inside[k] = true;
        }
        // χ = 2s − Σ_t (s − cycles of σ_t on the orbit)
        let mut chi = 2 * s as i64;
        for p in &pair {
            let cycles = p.cycles().iter().filter(|c| inside[c[0]]).count();
            chi -= (s - cycles) as i64;
        }
        if chi > 2 || chi % 2 != 0 {
            return Err(Error::Inconsistent(format!(
                "component has Euler characteristic {chi}"
            )));
        }
        components.push(CurveComponent {
            orbit: orbit.iter().map(|&k| (k / n, k % n)).collect(),
            deg_p: s / m,
            deg_q: s / n,
            genus: ((2 - chi) / 2) as u64,
        });
    }
    Ok(FiberDecomposition {
        n: components.len(),
        components,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GenusRow {
    pub d: usize,
    pub n: usize,
    pub min_genus: u64,
    pub components: Vec<CurveComponent>,
}

/// Decompositions of A°ᵈ(x) = U(y) for d = 1..=d_max.
pub fn genus_sequence<K: Field>(
    a: &RatFunc<K>,
    u: &RatFunc<K>,
    d_max: usize,
    bits: u32,
) -> Result<Vec<GenusRow>> {
    if a.degree() < 2 || u.degree() < 1 {
        return Err(Error::Precondition(
            "genus sequence needs deg A >= 2 and U nonconstant".into(),
        ));
    }
    let mu = MapData::new(u, bits)?;
    let mut rows = Vec::new();
    let mut iterate = RatFunc::identity();
    for d in 1..=d_max {
        let deg = a.degree().checked_pow(d as u32).unwrap_or(usize::MAX);
        if deg > MONODROMY_DEGREE_CAP {
            return Err(Error::Budget(format!(
                "deg A^{d} = {deg} exceeds the monodromy cap {MONODROMY_DEGREE_CAP}"
            )));
        }
        iterate = a.compose(&iterate)?;
        let dec = if u.degree() == 1 {
            fiber_components(&iterate, u, bits)?
        } else {
            fiber_components_of(&MapData::new(&iterate, bits)?, &mu)?
        };
        rows.push(GenusRow {
            d,
            n: dec.n,
            min_genus: dec.min_genus(),
            components: dec.components,
        });
    }
    Ok(rows)
}

/// Number of points z with p(z) = p(z₀), q(z) = q(z₀) for generic z₀: the
/// degree of the largest common compositional right factor of p and q.
pub fn common_right_factor_degree<K: Field>(p: &RatFunc<K>, q: &RatFunc<K>) -> Result<usize> {
    if p.is_constant() || q.is_constant() {
        return Err(Error::Precondition("right factors of constant maps".into()));
    }
    let level = |f: &RatFunc<K>, z0: &K| -> Poly<K> {
        // num(z)·den(z₀) − num(z₀)·den(z), vanishing exactly on f⁻¹(f(z₀))
        &f.num().scale(&f.den().eval(z0)) - &f.den().scale(&f.num().eval(z0))
    };
    let mut best = usize::MAX;
    for k in 0..16i64 {
        let z0 = K::from_int(if k % 2 == 0 { k / 2 } else { -(k + 1) / 2 });
        let (a, b) = (level(p, &z0), level(q, &z0));
        let mut count = a.gcd(&b).deg();
        let z0p = ProjPoint::Finite(z0);
        if p.value_at_infinity() == p.eval(&z0p) && q.value_at_infinity() == q.eval(&z0p) {
            count += 1;
        }
        best = best.min(count);
        if best == 1 {
            break;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, Serialize)]
pub struct GoodReport {
    pub unique_component: bool,
    pub no_common_right_factor: bool,
    pub degree_equalities: bool,
    /// Two of the three conditions hold.
    pub criterion_applies: bool,
    /// Unique component and no common right factor.
    pub good: bool,
}

/// Conditions for f, p, g, q with f∘p = g∘q to be a good solution.
pub fn check_good_solution<K: Field>(
    f: &RatFunc<K>,
    p: &RatFunc<K>,
    g: &RatFunc<K>,
    q: &RatFunc<K>,
    bits: u32,
) -> Result<GoodReport> {
    if f.compose(p)? != g.compose(q)? {
        return Err(Error::Precondition("f∘p and g∘q differ".into()));
    }
    let unique_component = fiber_components(f, g, bits)?.n == 1;
    let no_common_right_factor = common_right_factor_degree(p, q)? == 1;
    let degree_equalities = f.degree() == q.degree() && g.degree() == p.degree();
    let held = [unique_component, no_common_right_factor, degree_equalities]
        .iter()
        .filter(|&&b| b)
        .count();
    Ok(GoodReport {
        unique_component,
        no_common_right_factor,
        degree_equalities,
        criterion_applies: held >= 2,
        good: unique_component && no_common_right_factor,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct M2Report {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "crate::funcalg::field::serialize_rational")]
    pub chi_orbifold: Rational,
    pub genus: u64,
    pub chi_e: i64,
    #[serde(serialize_with = "crate::funcalg::field::serialize_rational")]
    pub bound: Rational,
    pub holds: bool,
}

/// χ(E) ≤ 2(n − 1) − m/42 for the unique component E of {P(x) = W(y)},
/// n = deg W, m = deg P, when χ(O₂^W) < 0.
pub fn theorem_m2_check<K: Field>(w: &RatFunc<K>, p: &RatFunc<K>, bits: u32) -> Result<M2Report> {
    if w.degree() < 2 || p.is_constant() {
        return Err(Error::Precondition(
            "need deg W >= 2 and P nonconstant".into(),
        ));
    }
    let mw = MapData::new(w, bits)?;
    let chi_orbifold = branch_orbifold(&mw)?.euler_char();
    if chi_orbifold >= Rational::from_integer(0.into()) {
        return Err(Error::Precondition(format!(
            "chi(O2^W) = {chi_orbifold} is not negative"
        )));
    }
    let dec = if p.degree() == 1 {
        fiber_components(p, w, bits)?
    } else {
        fiber_components_of(&MapData::new(p, bits)?, &mw)?
    };
    if dec.n != 1 {
        return Err(Error::Precondition(format!(
            "fiber product of P and W has {} components",
            dec.n
        )));
    }
    let genus = dec.components[0].genus;
    let chi_e = 2 - 2 * genus as i64;
    let (n, m) = (w.degree(), p.degree());
    let bound = Rational::from_integer((2 * (n as i64 - 1)).into())
        - Ratio::new((m as i64).into(), 42.into());
    let holds = Rational::from_integer(chi_e.into()) <= bound;
    Ok(M2Report {
        n,
        m,
        chi_orbifold,
        genus,
        chi_e,
        bound,
        holds,
    })
}
