//! Special maps (conjugates of z^{±n} and ±T_n, Lattès maps) and the
//! maximal invariant orbifold O₀ of a generalized Lattès map.
//!
//! Admissible orbifolds O (those with A: O → O minimal holomorphic) are
//! searched over supports inside the critical values of A°ᵏ, where k is the
//! least exponent with deg A°ᵏ ≥ 5: O is admissible for A°ᵏ too, and for
//! maps of degree at least five c(O) lies in the critical values. Each
//! candidate is checked exactly from critical data:
//!
//! - the support S is forward invariant and ν(A z) = ν(z)·gcd(deg_z A, ν(A z))
//!   on S;
//! - every preimage of a point w ∈ S outside S is critical with ν(w) | deg_z A,
//!   checked by summing local degrees to deg A.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::critical::{push_unique, MapData};
use crate::analytic::roots_squarefree;
use crate::error::{Error, Result};
use crate::funcalg::{chebyshev, conjugate, Field, Mobius, Poly, ProjPoint, RatFunc};
use crate::orbifold::point::radicand_of;
use crate::orbifold::{classify_map, MapKind, Orbifold, OrbifoldJson, Point};

/// Largest ν tried for the unbounded families {n, n} and {2, 2, n}.
pub const NU_SEARCH_BOUND: u64 = 64;
/// Largest support size (the longest signature with χ ≥ 0).
pub const MAX_SUPPORT: usize = 4;
/// Candidate supports examined before giving up.
const SUPPORT_BUDGET: usize = 200_000;

/// Signatures with χ ≥ 0 besides the two infinite families.
const SPORADIC: [&[u64]; 7] = [
    &[2, 3, 3],
    &[2, 3, 4],
    &[2, 3, 5],
    &[3, 3, 3],
    &[2, 4, 4],
    &[2, 3, 6],
    &[2, 2, 2, 2],
];

#[derive(Clone, Debug)]
pub enum SpecialClass<K: Field> {
    /// A = μ∘z^n∘μ⁻¹ with n = ±deg A; μ is absent when the conjugacy is not
    /// defined over the coefficient field.
    PowerConjugate {
        n: i64,
        mu: Option<Mobius<K>>,
    },
    /// A = μ∘(sign·T_n)∘μ⁻¹.
    ChebyshevConjugate {
        sign: i8,
        n: usize,
        mu: Option<Mobius<K>>,
    },
    Lattes(Orbifold<K>),
    GeneralizedLattes(Orbifold<K>),
    NotSpecial,
}

impl<K: Field> SpecialClass<K> {
    pub fn tag(&self) -> &'static str {
        match self {
            SpecialClass::PowerConjugate { .. } => "PowerConjugate",
            SpecialClass::ChebyshevConjugate { .. } => "ChebyshevConjugate",
            SpecialClass::Lattes(_) => "Lattes",
            SpecialClass::GeneralizedLattes(_) => "GeneralizedLattes",
            SpecialClass::NotSpecial => "NotSpecial",
        }
    }

    /// Conjugate to z^{±n} or ±T_n.
    pub fn is_exceptional(&self) -> bool {
        matches!(
            self,
            SpecialClass::PowerConjugate { .. } | SpecialClass::ChebyshevConjugate { .. }
        )
    }
}

#[derive(Clone, Debug)]
pub struct LattesReport<K: Field> {
    pub class: SpecialClass<K>,
    /// O₀ᴬ, the ⪯-maximum of the admissible orbifolds.
    pub maximal: Option<Orbifold<K>>,
    pub admissible: Vec<Orbifold<K>>,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
pub struct LattesJson {
    pub class: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    pub maximal: Option<OrbifoldJson>,
    pub admissible: Vec<OrbifoldJson>,
    pub warnings: Vec<String>,
}

impl<K: Field> LattesReport<K> {
    pub fn to_json(&self) -> LattesJson {
        let (n, sign, mu) = match &self.class {
            SpecialClass::PowerConjugate { n, mu } => {
                (Some(*n), None, mu.as_ref().map(Mobius::to_expr))
            }
            SpecialClass::ChebyshevConjugate { sign, n, mu } => (
                Some(*n as i64),
                Some(*sign),
                mu.as_ref().map(Mobius::to_expr),
            ),
            _ => (None, None, None),
        };
        LattesJson {
            class: self.class.tag(),
            n,
            sign,
            mu,
            maximal: self.maximal.as_ref().map(Orbifold::to_json),
            admissible: self.admissible.iter().map(Orbifold::to_json).collect(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Full classification: exceptional conjugacy first, then the orbifold
/// search.
pub fn classify_special<K: Field>(a: &RatFunc<K>, bits: u32) -> Result<SpecialClass<K>> {
    Ok(analyze(a, bits)?.class)
}

/// Classification together with the admissible orbifolds.
pub fn analyze<K: Field>(a: &RatFunc<K>, bits: u32) -> Result<LattesReport<K>> {
    if a.degree() < 2 {
        return Err(Error::Precondition(
            "classification needs deg A >= 2".into(),
        ));
    }
    let md = MapData::new(a, bits)?;
    if let Some(class) = exceptional_class(&md)? {
        let admissible = admissible_orbifolds(&md, NU_SEARCH_BOUND)?;
        return Ok(LattesReport {
            class,
            maximal: None,
            admissible,
            warnings: Vec::new(),
        });
    }
    report_from_search(&md)
}

/// O₀ and the admissible orbifolds of a map that is not conjugate to z^{±n}
/// or ±T_n.
pub fn detect_generalized_lattes<K: Field>(a: &RatFunc<K>, bits: u32) -> Result<LattesReport<K>> {
    if a.degree() < 2 {
        return Err(Error::Precondition("detection needs deg A >= 2".into()));
    }
    report_from_search(&MapData::new(a, bits)?)
}

fn report_from_search<K: Field>(md: &MapData<K>) -> Result<LattesReport<K>> {
    let admissible = admissible_orbifolds(md, NU_SEARCH_BOUND)?;
    let bits = md.bits;
    let mut tops: Vec<&Orbifold<K>> = Vec::new();
    for o in &admissible {
        let mut dominated = false;
        for p in &admissible {
            if !std::ptr::eq(o, p) && o.preceq(p, bits)? && !p.preceq(o, bits)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            tops.push(o);
        }
    }
    let mut warnings = Vec::new();
    let maximal = match tops.len() {
        0 => None,
        1 => Some(tops[0].clone()),
        k => {
            warnings.push(format!(
                "{k} incomparable maximal orbifolds; the map may be conjugate to a power or Chebyshev map over an extension field"
            ));
            None
        }
    };
    let class = match (&maximal, tops.first()) {
        (_, None) => SpecialClass::NotSpecial,
        (Some(o), _)
            if o.euler_char().numer() == &0.into()
                && classify_map(md, o, o)? == MapKind::Covering =>
        {
            SpecialClass::Lattes(o.clone())
        }
        (Some(o), _) => SpecialClass::GeneralizedLattes(o.clone()),
        (None, Some(o)) => SpecialClass::GeneralizedLattes((*o).clone()),
    };
    Ok(LattesReport {
        class,
        maximal,
        admissible,
        warnings,
    })
}

/// O₀ of A°ˡ equals O₀ of A.
pub fn maximal_orbifold_consistency<K: Field>(a: &RatFunc<K>, l: usize, bits: u32) -> Result<bool> {
    if !(1..=3).contains(&l) {
        return Err(Error::Precondition("iterate count must be 1..=3".into()));
    }
    let base = detect_generalized_lattes(a, bits)?;
    let iter = detect_generalized_lattes(&a.iterate(l)?, bits)?;
    match (&base.maximal, &iter.maximal) {
        (None, None) => Ok(base.admissible.is_empty() == iter.admissible.is_empty()),
        (Some(x), Some(y)) => x.same(y, bits),
        _ => Ok(false),
    }
}

/// Candidate points with the local data the admissibility test needs.
struct Candidates<K: Field> {
    points: Vec<Point<K>>,
    image: Vec<Option<usize>>,
    degree: Vec<usize>,
    /// Critical points over each candidate: (candidate index, local degree).
    critical_over: Vec<Vec<(Option<usize>, usize)>>,
}

fn index_of<K: Field>(pts: &[Point<K>], p: &Point<K>, bits: u32) -> Result<Option<usize>> {
    for (i, q) in pts.iter().enumerate() {
        if q.same(p, bits)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

fn candidates<K: Field>(md: &MapData<K>) -> Result<Candidates<K>> {
    let bits = md.bits;
    let n = md.degree();
    // least k with n^k ≥ 5
    let mut k = 1;
    while n.pow(k as u32) < 5 {
        k += 1;
    }
    let mut points: Vec<Point<K>> = Vec::new();
    let mut layer = md.critical_values()?;
    for _ in 0..k {
        let mut next = Vec::new();
        for p in layer {
            if push_unique(&mut points, p.clone(), bits)? {
                next.push(md.image(&p)?);
            }
        }
        layer = next;
    }
    let mut image = Vec::with_capacity(points.len());
    let mut degree = Vec::with_capacity(points.len());
    for p in &points {
        image.push(index_of(&points, &md.image(p)?, bits)?);
        degree.push(md.local_degree(p)?);
    }
    let mut critical_over = Vec::with_capacity(points.len());
    for w in &points {
        let mut over = Vec::new();
        for (z, d) in md.critical_over(w)? {
            over.push((index_of(&points, &z, bits)?, d));
        }
        critical_over.push(over);
    }
    Ok(Candidates {
        points,
        image,
        degree,
        critical_over,
    })
}

impl<K: Field> Candidates<K> {
    /// Exact test of ν(A z) = ν(z)·gcd(deg_z A, ν(A z)) everywhere for the
    /// orbifold with marks `nu` on `support`.
    fn admissible(&self, deg: usize, support: &[usize], nu: &[u64]) -> bool {
        let nu_at = |i: usize| support.iter().position(|&s| s == i).map_or(1, |k| nu[k]);
        for (k, &c) in support.iter().enumerate() {
            let Some(w) = self.image[c] else { return false };
            let nw = nu_at(w);
            if nw == 1 || nw != nu[k] * (self.degree[c] as u64).gcd(&nw) {
                return false;
            }
        }
        for (k, &w) in support.iter().enumerate() {
            let mut total: usize = support
                .iter()
                .filter(|&&c| self.image[c] == Some(w))
                .map(|&c| self.degree[c])
                .sum();
            for &(ci, d) in &self.critical_over[w] {
                if ci.is_some_and(|i| support.contains(&i)) {
                    continue;
                }
                if (d as u64).is_multiple_of(nu[k]) {
                    total += d;
                }
            }
            if total != deg {
                return false;
            }
        }
        true
    }
}

/// Every ν assignment on a support of the given size with a χ ≥ 0 good
/// signature.
fn assignments(size: usize, bound: u64) -> Vec<Vec<u64>> {
    let mut patterns: Vec<Vec<u64>> = Vec::new();
    match size {
        2 => patterns.extend((2..=bound).map(|n| vec![n, n])),
        3 => {
            patterns.extend((2..=bound).map(|n| vec![2, 2, n]));
            patterns.extend(SPORADIC.iter().filter(|s| s.len() == 3).map(|s| s.to_vec()));
        }
        4 => patterns.push(vec![2, 2, 2, 2]),
        _ => {}
    }
    let mut out: Vec<Vec<u64>> = Vec::new();
    for p in patterns {
        for perm in permutations(&p) {
            if !out.contains(&perm) {
                out.push(perm);
            }
        }
    }
    out
}

fn permutations(v: &[u64]) -> Vec<Vec<u64>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// All orbifolds O ≠ the non-ramified sphere with A: O → O minimal
/// holomorphic, with ν ≤ `bound` in the infinite families; sorted by
/// support, then signature.
pub fn admissible_orbifolds<K: Field>(md: &MapData<K>, bound: u64) -> Result<Vec<Orbifold<K>>> {
    let cand = candidates(md)?;
    let deg = md.degree();
    let m = cand.points.len();
    let mut supports = Vec::new();
    for size in 2..=MAX_SUPPORT.min(m) {
        for s in subsets(m, size) {
            // forward invariance prunes almost every support
            if s.iter()
                .all(|&c| cand.image[c].is_some_and(|w| s.contains(&w)))
            {
                supports.push(s);
            }
            if supports.len() > SUPPORT_BUDGET {
                return Err(Error::Budget(format!(
                    "more than {SUPPORT_BUDGET} candidate supports"
                )));
            }
        }
    }
    let found: Vec<(Vec<usize>, Vec<u64>)> = supports
        .par_iter()
        .flat_map_iter(|s| {
            assignments(s.len(), bound)
                .into_iter()
                .filter(|nu| cand.admissible(deg, s, nu))
                .map(|nu| (s.clone(), nu))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut out = Vec::with_capacity(found.len());
    for (s, nu) in found {
        let marks = s
            .iter()
            .zip(&nu)
            .map(|(&i, &v)| (cand.points[i].clone(), v))
            .collect();
        let o = Orbifold::new(marks, md.bits)?;
        if classify_map(md, &o, &o)? < MapKind::MinimalHolomorphic {
            return Err(Error::Inconsistent(format!(
                "admissible orbifold {} fails re-verification",
                o.describe()
            )));
        }
        out.push(o);
    }
    Ok(out)
}

/// Conjugacy to z^{±n} or ±T_n, detected from branching.
fn exceptional_class<K: Field>(md: &MapData<K>) -> Result<Option<SpecialClass<K>>> {
    if let Some(c) = power_class(md)? {
        return Ok(Some(c));
    }
    chebyshev_class(md)
}

/// Two totally ramified critical points forming an invariant pair.
fn power_class<K: Field>(md: &MapData<K>) -> Result<Option<SpecialClass<K>>> {
    let n = md.degree();
    let bits = md.bits;
    if md.critical.len() != 2 || md.critical.iter().any(|c| c.local_degree != n) {
        return Ok(None);
    }
    // the finite point goes to 0 so that z^n itself normalizes to the identity
    let (i, j) = if md.critical[0].point.is_infinite() {
        (1, 0)
    } else {
        (0, 1)
    };
    let (a, b) = (&md.critical[i].point, &md.critical[j].point);
    let (fa, fb) = (&md.critical[i].value, &md.critical[j].value);
    let sign: i64 = if fa.same(a, bits)? && fb.same(b, bits)? {
        1
    } else if fa.same(b, bits)? && fb.same(a, bits)? {
        -1
    } else {
        return Ok(None);
    };
    let mu = match (a.to_proj(), b.to_proj()) {
        (Some(pa), Some(pb)) => power_normalization(&md.f, &pa, &pb, n, sign)?,
        _ => None,
    };
    Ok(Some(SpecialClass::PowerConjugate {
        n: sign * n as i64,
        mu,
    }))
}

/// μ with A = μ∘z^{±n}∘μ⁻¹ sending 0, ∞ to a, b, when one exists over K.
fn power_normalization<K: Field>(
    f: &RatFunc<K>,
    a: &ProjPoint<K>,
    b: &ProjPoint<K>,
    n: usize,
    sign: i64,
) -> Result<Option<Mobius<K>>> {
    let m = Mobius::to_zero_inf(a, b)?;
    let g = conjugate(f, &m)?;
    // g = c·z^n or c·z^{-n}
    let (c, k) = if sign > 0 {
        (g.num().lc(), n - 1)
    } else {
        (g.num().coeff(0).inv(), n + 1)
    };
    let Some(t) = field_root(&c, k, radicand_of(f).as_ref()) else {
        return Ok(None);
    };
    let mu = Mobius::scaling(t)?.then_after(&m).inverse();
    let target = if sign > 0 {
        crate::funcalg::power(n)
    } else {
        crate::funcalg::power::<K>(n).source_inverted()
    };
    debug_assert_eq!(conjugate(&target, &mu)?, *f);
    Ok(Some(mu))
}

/// A k-th root of c in K, preferring the largest real part.
fn field_root<K: Field>(c: &K, k: usize, radicand: Option<&num_bigint::BigInt>) -> Option<K> {
    if k == 1 {
        return Some(c.clone());
    }
    let mut coeffs = vec![K::zero(); k + 1];
    coeffs[0] = -c.clone();
    coeffs[k] = K::one();
    let p = Poly::new(coeffs);
    let mut found: Vec<Point<K>> = roots_squarefree(&p, 64)
        .ok()?
        .into_iter()
        .map(|r| Point::from_root(&p, r, radicand))
        .filter(|pt| pt.exact().is_some())
        .collect();
    found.sort_by(|x, y| y.cmp_key(x));
    found.into_iter().find_map(|pt| pt.exact().cloned())
}

/// A totally invariant critical point c of full degree, at most two other
/// critical values {α, β} (β = A(α) when there is only one), every other
/// critical point simple, and {α: 2, β: 2} an invariant orbifold.
fn chebyshev_class<K: Field>(md: &MapData<K>) -> Result<Option<SpecialClass<K>>> {
    let n = md.degree();
    let bits = md.bits;
    let Some(center) = md
        .critical
        .iter()
        .find(|c| c.local_degree == n && c.value.same(&c.point, bits).unwrap_or(false))
    else {
        return Ok(None);
    };
    let c = center.point.clone();
    if md
        .critical
        .iter()
        .any(|x| !x.point.same(&c, bits).unwrap_or(false) && x.local_degree != 2)
    {
        return Ok(None);
    }
    let mut values: Vec<Point<K>> = Vec::new();
    for x in &md.critical {
        if !x.value.same(&c, bits)? {
            push_unique(&mut values, x.value.clone(), bits)?;
        }
    }
    let (alpha, beta) = match values.len() {
        1 => {
            let b = md.image(&values[0])?;
            if b.same(&values[0], bits)? || b.same(&c, bits)? {
                return Ok(None);
            }
            (values[0].clone(), b)
        }
        2 => (values[0].clone(), values[1].clone()),
        _ => return Ok(None),
    };
    let o = Orbifold::new(vec![(alpha.clone(), 2), (beta.clone(), 2)], bits)?;
    if classify_map(md, &o, &o)? < MapKind::MinimalHolomorphic {
        return Ok(None);
    }
    let mut best: Option<(i8, Mobius<K>)> = None;
    if let (Some(pa), Some(pb), Some(pc)) = (alpha.to_proj(), beta.to_proj(), c.to_proj()) {
        let targets = [ProjPoint::int(-1), ProjPoint::int(1), ProjPoint::Infinity];
        let t: RatFunc<K> = chebyshev(n);
        for (p, q) in [(&pa, &pb), (&pb, &pa)] {
            let m = Mobius::from_points([p, q, &pc], [&targets[0], &targets[1], &targets[2]])?;
            let g = conjugate(&md.f, &m)?;
            let sign = if g == t {
                1
            } else if g == t.neg() {
                -1
            } else {
                continue;
            };
            if best.as_ref().is_none_or(|(s, _)| *s < sign) {
                best = Some((sign, m.inverse()));
            }
        }
        if best.is_none() {
            return Err(Error::Inconsistent(
                "Chebyshev branching without an exact conjugacy".into(),
            ));
        }
    }
    Ok(Some(match best {
        Some((sign, mu)) => SpecialClass::ChebyshevConjugate {
            sign,
            n,
            mu: Some(mu),
        },
        None => SpecialClass::ChebyshevConjugate {
            sign: 1,
            n,
            mu: None,
        },
    }))
}
