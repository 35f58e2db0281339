//! Compositional left factors, the coverings θ of orbifolds with χ > 0, and
//! the bounded-genus test built on them.

use serde::Serialize;

use crate::analytic::critical::MapData;
use crate::analytic::roots_squarefree;
use crate::error::{Error, Result};
use crate::fibercurve::fiber_components;
use crate::funcalg::{conjugate, dfunc, power, Field, Mobius, Poly, ProjPoint, RatFunc};
use crate::lattes::{analyze, SpecialClass};
use crate::orbifold::point::radicand_of;
use crate::orbifold::{branch_orbifold, Orbifold, OrbifoldJson, Point};
use crate::orbits::rational_preimages;

/// Iterates tried by the bounded-genus test when none is given.
pub const DEFAULT_L_MAX: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Absence {
    /// deg U does not divide deg F.
    DegreeMismatch,
    /// O₂ᵁ ⪯ O₂ᶠ fails.
    OrbifoldObstruction,
    /// No component of U(x) = F(y) projects with degree one to y.
    NoMonodromyBlock,
    /// A degree-one component exists but V has no coefficients in the field.
    NoCoefficientSolution,
    /// No V over the field; the monodromy computation that would decide
    /// existence over ℂ ran out of precision.
    NoFieldSolution,
}

#[derive(Clone, Debug)]
pub enum LeftFactorWitness<K: Field> {
    /// F = U∘V.
    Present(RatFunc<K>),
    Absent(Absence),
}

impl<K: Field> LeftFactorWitness<K> {
    pub fn right_factor(&self) -> Option<&RatFunc<K>> {
        match self {
            LeftFactorWitness::Present(v) => Some(v),
            LeftFactorWitness::Absent(_) => None,
        }
    }
}

/// Finds V with F = U∘V, or reports why none exists over the field.
pub fn left_factor<K: Field>(
    u: &RatFunc<K>,
    f: &RatFunc<K>,
    bits: u32,
) -> Result<LeftFactorWitness<K>> {
    if u.is_constant() || f.is_constant() {
        return Err(Error::Precondition(
            "left factors need nonconstant maps".into(),
        ));
    }
    u.common_tag(f)?;
    let (du, df) = (u.degree(), f.degree());
    if df % du != 0 {
        return Ok(LeftFactorWitness::Absent(Absence::DegreeMismatch));
    }
    if du == 1 {
        let inv = Mobius::from_ratfunc(u)?.inverse().to_ratfunc();
        return Ok(LeftFactorWitness::Present(inv.compose(f)?));
    }
    let mu = MapData::new(u, bits)?;
    if df > 1 {
        let mf = MapData::new(f, bits)?;
        let o2u = branch_orbifold(&mu)?;
        let o2f = branch_orbifold(&mf)?;
        if !o2u.preceq(&o2f, bits)? {
            return Ok(LeftFactorWitness::Absent(Absence::OrbifoldObstruction));
        }
    }
    // reconstruction finds V whenever it exists over the field; monodromy
    // only explains an absence
    if let Some(v) = reconstruct(u, f, df / du, bits)? {
        return Ok(LeftFactorWitness::Present(v));
    }
    match fiber_components(u, f, bits) {
        Ok(dec) if dec.components.iter().any(|c| c.deg_q == 1) => {
            Ok(LeftFactorWitness::Absent(Absence::NoCoefficientSolution))
        }
        Ok(_) => Ok(LeftFactorWitness::Absent(Absence::NoMonodromyBlock)),
        Err(e) if e.is_resource() => Ok(LeftFactorWitness::Absent(Absence::NoFieldSolution)),
        Err(e) => Err(e),
    }
}

/// Smallest x₀ ∈ ℕ with F(x₀) finite and a regular value of U other than
/// U(∞); every y with U(y) = F(x₀) is then finite and non-critical.
fn expansion_point<K: Field>(u: &RatFunc<K>, f: &RatFunc<K>) -> (K, K) {
    let n = u.degree();
    let u_inf = u.value_at_infinity();
    let mut x = 0i64;
    loop {
        let x0 = K::from_int(x);
        x += 1;
        let den = f.den().eval(&x0);
        if den.is_zero() {
            continue;
        }
        let c = f.num().eval(&x0) / den;
        if u_inf.finite() == Some(&c) {
            continue;
        }
        let h = u.num() - &u.den().scale(&c);
        if h.deg() == n && h.gcd(&h.derivative()).is_constant() {
            return (x0, c);
        }
    }
}

/// The points of the fiber U⁻¹(c) lying in the field, largest real part
/// first. Rational points are found exactly; over ℚ(√d) the irrational
/// ones come from the certified numerical roots.
fn rational_fiber<K: Field>(u: &RatFunc<K>, c: &K, bits: u32) -> Result<Vec<K>> {
    let h = u.num() - &u.den().scale(c);
    let radicand = radicand_of(u);
    let mut pts: Vec<Point<K>> = Vec::new();
    let mut exact = false;
    if let (Some(uq), Some(cq)) = (u.to_rational(), c.as_rational()) {
        exact = true;
        for y in rational_preimages(&uq, &ProjPoint::Finite(cq))?.solutions {
            if let ProjPoint::Finite(y) = y {
                pts.push(Point::Exact(K::from_rational(y)));
            }
        }
    }
    if radicand.is_some() || !exact {
        for r in roots_squarefree(&h, bits)? {
            let p = Point::from_root(&h, r, radicand.as_ref());
            if p.exact().is_some() && !pts.iter().any(|q| q.exact() == p.exact()) {
                pts.push(p);
            }
        }
    }
    pts.sort_by(|a, b| b.cmp_key(a));
    Ok(pts.into_iter().filter_map(|p| p.exact().cloned()).collect())
}

/// Series in t truncated to `n` terms.
fn series_mul<K: Field>(a: &[K], b: &[K], n: usize) -> Vec<K> {
    let mut out = vec![K::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// a/b for b(0) ≠ 0.
fn series_div<K: Field>(a: &[K], b: &[K], n: usize) -> Vec<K> {
    let b0 = b[0].inv();
    let mut out = vec![K::zero(); n];
    for k in 0..n {
        let mut acc = a.get(k).cloned().unwrap_or_else(K::zero);
        for j in 1..=k.min(b.len() - 1) {
            acc = acc - b[j].clone() * out[k - j].clone();
        }
        out[k] = acc * b0.clone();
    }
    out
}

fn series_of_poly<K: Field>(p: &Poly<K>, w: &[K], n: usize) -> Vec<K> {
    let mut acc = vec![K::zero(); n];
    for c in p.coeffs().iter().rev() {
        acc = series_mul(&acc, w, n);
        acc[0] = acc[0].clone() + c.clone();
    }
    acc
}

/// Expansion of F at x₀ in t = x − x₀.
fn taylor<K: Field>(f: &RatFunc<K>, x0: &K, n: usize) -> Vec<K> {
    let shift = Poly::new(vec![x0.clone(), K::one()]);
    let mut num = f.num().compose(&shift).coeffs().to_vec();
    let den = f.den().compose(&shift).coeffs().to_vec();
    num.resize(n.max(num.len()), K::zero());
    series_div(&num, &den, n)
}

/// V from its branch through (x₀, y₀): the Taylor coefficients of V solve
/// U(V) = F one at a time, then a Padé step turns them into V.
fn reconstruct<K: Field>(
    u: &RatFunc<K>,
    f: &RatFunc<K>,
    m: usize,
    bits: u32,
) -> Result<Option<RatFunc<K>>> {
    let (x0, c) = expansion_point(u, f);
    let n = 2 * m + 2;
    let target = taylor(f, &x0, n);
    let du = &(&u.num().derivative() * u.den()) - &(u.num() * &u.den().derivative());
    for y0 in rational_fiber(u, &c, bits)? {
        let slope = du.eval(&y0) / (u.den().eval(&y0) * u.den().eval(&y0));
        let mut w = vec![K::zero(); n];
        w[0] = y0.clone();
        for k in 1..n {
            let val = series_div(
                &series_of_poly(u.num(), &w, k + 1),
                &series_of_poly(u.den(), &w, k + 1),
                k + 1,
            );
            w[k] = (target[k].clone() - val[k].clone()) / slope.clone();
        }
        let Some((p, q)) = pade(&w, m) else { continue };
        let back = Poly::new(vec![-x0.clone(), K::one()]);
        let v = RatFunc::new(p.compose(&back), q.compose(&back))?;
        if v.degree() == m && u.compose(&v)? == *f {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// (p, q) with deg p, deg q ≤ m, q(0) ≠ 0 and q·w ≡ p mod t^{len w}.
fn pade<K: Field>(w: &[K], m: usize) -> Option<(Poly<K>, Poly<K>)> {
    let (mut r0, mut r1) = (Poly::monomial(K::one(), w.len()), Poly::new(w.to_vec()));
    let (mut s0, mut s1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() && r1.deg() > m {
        let (q, r) = r0.div_rem(&r1);
        let s = &s0 - &(&q * &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (s1.deg() <= m && !s1.coeff(0).is_zero()).then_some((r1, s1))
}

/// θ: ℂℙ¹ → O realized as a rational Galois covering.
#[derive(Clone, Debug)]
pub struct ThetaCovering<K: Field> {
    pub orbifold: Orbifold<K>,
    pub theta: RatFunc<K>,
    /// Order of the deck group, equal to deg θ.
    pub deck_order: usize,
}

/// θ for the signatures {n, n} and {2, 2, n}.
pub fn theta_for<K: Field>(o: &Orbifold<K>, bits: u32) -> Result<ThetaCovering<K>> {
    let chi = o.euler_char();
    if chi <= num_traits::Zero::zero() {
        return Err(Error::Precondition(format!(
            "orbifold {} has chi <= 0 and no rational universal covering",
            o.describe()
        )));
    }
    let marks = o.marks();
    let proj = |i: usize| {
        marks[i].0.to_proj().ok_or_else(|| {
            Error::Unsupported(format!("mark {} is not defined over the field", marks[i].0))
        })
    };
    let mut sig = o.signature();
    sig.sort_unstable();
    let theta = match sig.as_slice() {
        [a, b] if a == b => {
            let m = Mobius::to_zero_inf(&proj(0)?, &proj(1)?)?.inverse();
            conjugate(&power(*a as usize), &m)?
        }
        [2, 2, n] => {
            let c = marks
                .iter()
                .rposition(|(_, nu)| nu == n)
                .expect("mark with nu = n");
            let rest: Vec<usize> = (0..3).filter(|&i| i != c).collect();
            let src = [ProjPoint::int(-1), ProjPoint::int(1), ProjPoint::Infinity];
            let (pa, pb, pc) = (proj(rest[0])?, proj(rest[1])?, proj(c)?);
            let m = Mobius::from_points([&src[0], &src[1], &src[2]], [&pa, &pb, &pc])?;
            m.to_ratfunc().compose(&dfunc(*n as usize))?
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "covering for signature {sig:?}"
            )))
        }
    };
    let got = branch_orbifold(&MapData::new(&theta, bits)?)?;
    if !got.same(o, bits)? {
        return Err(Error::Inconsistent(format!(
            "covering has orbifold {} instead of {}",
            got.describe(),
            o.describe()
        )));
    }
    let deck_order = theta.degree();
    Ok(ThetaCovering {
        orbifold: o.clone(),
        theta,
        deck_order,
    })
}

/// A∘X = X∘B exactly.
pub fn verify_semiconjugacy<K: Field>(
    a: &RatFunc<K>,
    x: &RatFunc<K>,
    b: &RatFunc<K>,
) -> Result<bool> {
    a.common_tag(x)?;
    x.common_tag(b)?;
    Ok(a.compose(x)? == x.compose(b)?)
}

#[derive(Clone, Debug)]
pub enum Verdict<K: Field> {
    /// U is a left factor of A°ˡ∘θ (θ = z when A is not generalized Lattès).
    BoundedWitness {
        l: usize,
        v: RatFunc<K>,
        theta: RatFunc<K>,
    },
    NoWitnessUpTo(usize),
    /// A is conjugate to z^{±m} or ±T_m; the closed-form factor shapes decide.
    SpecialRoute {
        bounded: bool,
        form: String,
    },
    Unsupported(String),
}

#[derive(Serialize)]
pub struct VerdictJson {
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounded: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximal: Option<OrbifoldJson>,
}

#[derive(Clone, Debug)]
pub struct BoundedGenusReport<K: Field> {
    pub verdict: Verdict<K>,
    pub maximal: Option<Orbifold<K>>,
}

impl<K: Field> BoundedGenusReport<K> {
    pub fn to_json(&self) -> VerdictJson {
        let mut out = VerdictJson {
            verdict: "",
            l: None,
            v: None,
            theta: None,
            bounded: None,
            reason: None,
            maximal: self.maximal.as_ref().map(Orbifold::to_json),
        };
        match &self.verdict {
            Verdict::BoundedWitness { l, v, theta } => {
                out.verdict = "BoundedWitness";
                out.l = Some(*l);
                out.v = Some(v.to_expr());
                out.theta = Some(theta.to_expr());
            }
            Verdict::NoWitnessUpTo(l) => {
                out.verdict = "NoWitnessUpTo";
                out.l = Some(*l);
            }
            Verdict::SpecialRoute { bounded, form } => {
                out.verdict = "SpecialRoute";
                out.bounded = Some(*bounded);
                out.reason = Some(form.clone());
            }
            Verdict::Unsupported(r) => {
                out.verdict = "Unsupported";
                out.reason = Some(r.clone());
            }
        }
        out
    }
}

/// Whether g_d(A, U) stays bounded, witnessed by a left factor of A°ˡ∘θ.
pub fn bounded_genus_criterion<K: Field>(
    a: &RatFunc<K>,
    u: &RatFunc<K>,
    l_max: usize,
    bits: u32,
) -> Result<BoundedGenusReport<K>> {
    if a.degree() < 2 || u.degree() < 2 {
        return Err(Error::Precondition(
            "bounded-genus test needs deg A, deg U >= 2".into(),
        ));
    }
    a.common_tag(u)?;
    let report = analyze(a, bits)?;
    let (theta, maximal) = match &report.class {
        SpecialClass::PowerConjugate { mu, .. } | SpecialClass::ChebyshevConjugate { mu, .. } => {
            let verdict = match mu {
                Some(mu) => special_route(&report.class, mu, u, bits)?,
                None => Verdict::Unsupported(
                    "conjugacy to a power or Chebyshev map needs a field extension".into(),
                ),
            };
            return Ok(BoundedGenusReport {
                verdict,
                maximal: None,
            });
        }
        SpecialClass::Lattes(o) => {
            return Ok(BoundedGenusReport {
                verdict: Verdict::Unsupported(format!(
                    "Lattes map with chi = 0 orbifold {}",
                    o.describe()
                )),
                maximal: Some(o.clone()),
            })
        }
        SpecialClass::NotSpecial => (RatFunc::identity(), None),
        SpecialClass::GeneralizedLattes(o) => match theta_for(o, bits) {
            Ok(t) => (t.theta, Some(o.clone())),
            Err(Error::Unsupported(r)) | Err(Error::Precondition(r)) => {
                return Ok(BoundedGenusReport {
                    verdict: Verdict::Unsupported(r),
                    maximal: Some(o.clone()),
                })
            }
            Err(e) => return Err(e),
        },
    };
    let mut f = theta.clone();
    for l in 1..=l_max {
        f = a.compose(&f)?;
        if f.degree() % u.degree() != 0 {
            continue;
        }
        if let LeftFactorWitness::Present(v) = left_factor(u, &f, bits)? {
            return Ok(BoundedGenusReport {
                verdict: Verdict::BoundedWitness { l, v, theta },
                maximal,
            });
        }
    }
    Ok(BoundedGenusReport {
        verdict: Verdict::NoWitnessUpTo(l_max),
        maximal,
    })
}

/// Factor shapes for A ~ z^{±m} (U = z^s∘ν) and A ~ ±T_m
/// (U = ±T_s∘ν or D_s∘ν), read off the fibers of μ⁻¹∘U.
fn special_route<K: Field>(
    class: &SpecialClass<K>,
    mu: &Mobius<K>,
    u: &RatFunc<K>,
    bits: u32,
) -> Result<Verdict<K>> {
    let w = mu.inverse().to_ratfunc().compose(u)?;
    let md = MapData::new(&w, bits)?;
    let n = w.degree();
    let mults = |p: Point<K>| -> Result<Vec<usize>> {
        let mut v: Vec<usize> = md.fiber(&p)?.into_iter().map(|(_, d)| d).collect();
        v.sort_unstable();
        Ok(v)
    };
    let (bounded, form) = match class {
        SpecialClass::PowerConjugate { .. } => {
            let ok = mults(Point::int(0))? == vec![n] && mults(Point::Infinity)? == vec![n];
            (ok, format!("z^{n} o mu"))
        }
        _ => {
            let over_inf = mults(Point::Infinity)?;
            let plus = mults(Point::int(1))?;
            let minus = mults(Point::int(-1))?;
            let ram = |v: &[usize]| v.iter().map(|d| d - 1).sum::<usize>();
            let simple = plus.iter().chain(&minus).all(|&d| d <= 2);
            let full = ram(&over_inf) + ram(&plus) + ram(&minus) == 2 * n - 2;
            if simple && full && over_inf == vec![n] {
                (true, format!("+-T_{n} o mu"))
            } else if simple && full && n % 2 == 0 && over_inf == vec![n / 2, n / 2] {
                (true, format!("D_{} o mu", n / 2))
            } else {
                (false, "no T_s or D_s shape".to_string())
            }
        }
    };
    Ok(Verdict::SpecialRoute { bounded, form })
}
