//! Property tests for the invariants of each module.

mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use orbicalc::analytic::{critical_data, fiber_at, track, LoopSystem, MapData};
use orbicalc::decomp::{left_factor, theta_for, verify_semiconjugacy, Absence, LeftFactorWitness};
use orbicalc::fibercurve::{fiber_components, genus_sequence, monodromy};
use orbicalc::funcalg::field::int;
use orbicalc::funcalg::{conjugate, parse, print, Mobius, Poly, ProjPoint, RatFunc};
use orbicalc::lattes::detect_generalized_lattes;
use orbicalc::orbifold::{
    branch_orbifold, canonical_orbifolds, classify_map, pullback, MapKind, Orbifold, Point,
};
use orbicalc::orbits::{orbit_scan, progression_fit, rational_preimages, FitStatus};
use orbicalc::{Field, KRatFunc, QRatFunc, Rational};
use proptest::prelude::*;

use common::q;

const BITS: u32 = 128;

/// Nonconstant maps over ℚ of degree at most `max_deg` with coefficients in
/// −3..=3.
fn map(max_deg: usize) -> impl Strategy<Value = QRatFunc> {
    (
        prop::collection::vec(-3i64..=3, 1..=max_deg + 1),
        prop::collection::vec(-3i64..=3, 1..=max_deg + 1),
    )
        .prop_filter_map("constant or zero denominator", move |(n, d)| {
            let f = RatFunc::new(Poly::from_ints(&n), Poly::from_ints(&d)).ok()?;
            (f.degree() >= 1 && f.degree() <= max_deg).then_some(f)
        })
}

fn map_of_degree(lo: usize, hi: usize) -> impl Strategy<Value = QRatFunc> {
    map(hi).prop_filter("degree too small", move |f| f.degree() >= lo)
}

fn mobius() -> impl Strategy<Value = Mobius<Rational>> {
    (-3i64..=3, -3i64..=3, -3i64..=3, -3i64..=3).prop_filter_map("degenerate", |(a, b, c, d)| {
        Mobius::new(int(a), int(b), int(c), int(d)).ok()
    })
}

fn point() -> impl Strategy<Value = ProjPoint<Rational>> {
    prop_oneof![
        Just(ProjPoint::Infinity),
        (-4i64..=4).prop_map(ProjPoint::int)
    ]
}

fn proj_to_point(p: &ProjPoint<Rational>) -> Point<Rational> {
    Point::from_proj(p)
}

// ---- funcalg ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn composition_multiplies_degrees(f in map(5), g in map(5)) {
        prop_assert_eq!(f.compose(&g).unwrap().degree(), f.degree() * g.degree());
    }

    #[test]
    fn iterates_add(f in map_of_degree(1, 3), a in 0usize..3, b in 0usize..3) {
        let lhs = f.iterate(a + b).unwrap();
        let rhs = f.iterate(a).unwrap().compose(&f.iterate(b).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation_inverts(f in map(4), m in mobius()) {
        let back = conjugate(&conjugate(&f, &m).unwrap(), &m.inverse()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn evaluation_follows_composition(f in map(4), g in map(4), p in point()) {
        let fg = f.compose(&g).unwrap();
        prop_assert_eq!(fg.eval(&p), f.eval(&g.eval(&p)));
        for pole in rational_preimages(&g, &ProjPoint::Infinity).unwrap().solutions {
            prop_assert_eq!(fg.eval(&pole), f.eval(&g.eval(&pole)));
        }
    }

    #[test]
    fn printing_parses_back(f in map(5)) {
        let k: KRatFunc = RatFunc::from_rational(&f);
        prop_assert_eq!(parse(&print(&k)).unwrap(), k);
    }
}

// ---- analytic ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn critical_multiplicities_sum(f in map_of_degree(2, 6)) {
        let cd = critical_data(&f, BITS).unwrap();
        let total: usize = cd.iter().map(|c| c.local_degree - 1).sum();
        prop_assert_eq!(total, 2 * f.degree() - 2);
    }

    #[test]
    fn loops_compose_and_contract(f in map_of_degree(2, 4)) {
        let md = MapData::new(&f, BITS).unwrap();
        let centers: Vec<_> = md
            .critical_values()
            .unwrap()
            .iter()
            .filter_map(|w| w.approx())
            .collect();
        let obstacles: Vec<_> = f
            .value_at_infinity()
            .finite()
            .map(|c| c.to_complex::<f64>())
            .filter(|c| centers.iter().all(|w| (w - c).norm() > 1e-9))
            .into_iter()
            .collect();
        let ls = LoopSystem::new(&centers, &obstacles).unwrap();
        let start = fiber_at(&f, ls.base, BITS).unwrap();
        let n = f.degree();
        // out along the first loop's spoke and straight back encloses nothing
        let spoke = vec![ls.base, ls.loops[0][1], ls.base];
        prop_assert_eq!(track(&f, &spoke, &start, BITS).unwrap().permutation, (0..n).collect::<Vec<_>>());
        if ls.loops.len() >= 2 {
            let (a, b) = (&ls.loops[0], &ls.loops[1]);
            let pa = track(&f, a, &start, BITS).unwrap().permutation;
            let pb = track(&f, b, &start, BITS).unwrap().permutation;
            let mut joined = a.clone();
            joined.extend_from_slice(&b[1..]);
            let pab = track(&f, &joined, &start, BITS).unwrap().permutation;
            let composed: Vec<usize> = (0..n).map(|s| pb[pa[s]]).collect();
            prop_assert_eq!(pab, composed);
        }
    }
}

// ---- orbifold ----

fn orbifold_on_ints() -> impl Strategy<Value = Orbifold<Rational>> {
    prop::collection::btree_map(-3i64..=3, 2u64..=4, 1..=3).prop_map(|m| {
        let marks = m.into_iter().map(|(p, nu)| (Point::int(p), nu)).collect();
        Orbifold::unchecked(marks, BITS).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn canonical_pair_is_covering(f in map_of_degree(2, 5)) {
        let md = MapData::new(&f, BITS).unwrap();
        let (o1, o2) = canonical_orbifolds(&md).unwrap();
        prop_assert_eq!(classify_map(&md, &o1, &o2).unwrap(), MapKind::Covering);
        let deg = Rational::from_integer(BigInt::from(f.degree()));
        prop_assert_eq!(o1.euler_char(), deg * o2.euler_char());
    }

    #[test]
    fn holomorphic_maps_bound_euler_characteristic(f in map_of_degree(2, 4), o2 in orbifold_on_ints()) {
        let md = MapData::new(&f, BITS).unwrap();
        let (o1, _) = pullback(&md, &o2).unwrap();
        let kind = classify_map(&md, &o1, &o2).unwrap();
        prop_assert!(kind >= MapKind::Holomorphic);
        let bound = Rational::from_integer(BigInt::from(f.degree())) * o2.euler_char();
        prop_assert!(o1.euler_char() <= bound);
        prop_assert_eq!(o1.euler_char() == bound, kind == MapKind::Covering);
    }

    #[test]
    fn pullback_is_minimal_holomorphic(g in map_of_degree(2, 4), o2 in orbifold_on_ints()) {
        let md = MapData::new(&g, BITS).unwrap();
        let (o1, _) = pullback(&md, &o2).unwrap();
        prop_assert!(classify_map(&md, &o1, &o2).unwrap() >= MapKind::MinimalHolomorphic);
    }

    #[test]
    fn pullback_chain_rule(f in map_of_degree(1, 3), g in map_of_degree(1, 3), o in orbifold_on_ints()) {
        let gf = g.compose(&f).unwrap();
        let direct = pullback(&MapData::new(&gf, BITS).unwrap(), &o).unwrap().0;
        let inner = pullback(&MapData::new(&g, BITS).unwrap(), &o).unwrap().0;
        let stepwise = pullback(&MapData::new(&f, BITS).unwrap(), &inner).unwrap().0;
        prop_assert!(direct.same(&stepwise, BITS).unwrap(), "{} vs {}", direct.describe(), stepwise.describe());
    }
}

// ---- lattes ----

fn lattes_examples() -> Vec<QRatFunc> {
    vec![
        q(&[0, 432, 144], &[81, -18, 1]),
        q(&[0, 48], &[9, 24, 16]),
        q(&[1, 0, 2, 0, 1], &[0, -4, 0, 4]),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn admissible_orbifolds_are_minimal_holomorphic(f in map_of_degree(2, 3)) {
        let r = detect_generalized_lattes(&f, BITS).unwrap();
        let md = MapData::new(&f, BITS).unwrap();
        for o in &r.admissible {
            prop_assert_eq!(classify_map(&md, o, o).unwrap(), MapKind::MinimalHolomorphic);
            prop_assert!(!o.euler_char().is_negative());
        }
    }

    #[test]
    fn lattes_detection_is_mobius_invariant(k in 0usize..3, m in mobius()) {
        let a = &lattes_examples()[k];
        let r = detect_generalized_lattes(a, BITS).unwrap();
        let rc = detect_generalized_lattes(&conjugate(a, &m).unwrap(), BITS).unwrap();
        prop_assert_eq!(r.admissible.len(), rc.admissible.len());
        for o in &r.admissible {
            let moved = o.transport(&m, BITS).unwrap();
            let mut found = false;
            for p in &rc.admissible {
                found |= p.same(&moved, BITS).unwrap();
            }
            prop_assert!(found, "{} not found after conjugation", moved.describe());
        }
        let (o0, c0) = (r.maximal.unwrap(), rc.maximal.unwrap());
        prop_assert!(c0.same(&o0.transport(&m, BITS).unwrap(), BITS).unwrap());
    }
}

// ---- fibercurve ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fiber_product_components(f in map_of_degree(2, 4), g in map_of_degree(2, 4)) {
        let dec = fiber_components(&f, &g, BITS).unwrap();
        prop_assert_eq!(dec.components.iter().map(|c| c.deg_p).sum::<usize>(), g.degree());
        prop_assert_eq!(dec.components.iter().map(|c| c.deg_q).sum::<usize>(), f.degree());
        prop_assert!(dec.n <= f.degree().gcd(&g.degree()));
        for c in &dec.components {
            if c.deg_p == 1 || c.deg_q == 1 {
                prop_assert_eq!(c.genus, 0);
            }
        }
    }

    #[test]
    fn right_composition_refines_components(f in map_of_degree(2, 3), g in map_of_degree(2, 2), u in map_of_degree(2, 2)) {
        let gu = g.compose(&u).unwrap();
        let coarse = fiber_components(&f, &g, BITS).unwrap();
        let fine = fiber_components(&f, &gu, BITS).unwrap();
        prop_assert!(fine.n >= coarse.n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn genera_do_not_decrease(a in map_of_degree(2, 2), u in map_of_degree(2, 2)) {
        let rows = genus_sequence(&a, &u, 2, BITS).unwrap();
        for w in rows.windows(2) {
            prop_assert!(w[0].min_genus <= w[1].min_genus);
        }
    }
}

// ---- decomp ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn left_factors_verify(u in map_of_degree(2, 3), v in map_of_degree(1, 3)) {
        let f = u.compose(&v).unwrap();
        let w = left_factor(&u, &f, BITS).unwrap();
        let v2 = w.right_factor().expect("U o V has U as a left factor");
        prop_assert_eq!(u.compose(v2).unwrap(), f.clone());
        let (bu, bf) = (
            branch_orbifold(&MapData::new(&u, BITS).unwrap()).unwrap(),
            branch_orbifold(&MapData::new(&f, BITS).unwrap()).unwrap(),
        );
        prop_assert!(bu.preceq(&bf, BITS).unwrap());
    }

    #[test]
    fn lifts_through_theta_exist(m in mobius()) {
        let a = conjugate(&q(&[0, 48], &[9, 24, 16]), &m).unwrap();
        let o0 = detect_generalized_lattes(&a, BITS).unwrap().maximal.unwrap();
        let theta = theta_for(&o0, BITS).unwrap().theta;
        let w = left_factor(&theta, &a.compose(&theta).unwrap(), BITS).unwrap();
        // B exists over ℂ; over ℚ it may need a quadratic extension
        match w {
            LeftFactorWitness::Present(b) => prop_assert!(verify_semiconjugacy(&a, &theta, &b).unwrap()),
            LeftFactorWitness::Absent(why) => prop_assert_eq!(why, Absence::NoCoefficientSolution),
        }
    }
}

fn distinct_points(k: usize) -> impl Strategy<Value = Vec<ProjPoint<Rational>>> {
    prop::collection::btree_set(-4i64..=5, k).prop_map(|s| {
        // 5 stands for ∞
        s.into_iter()
            .map(|v| {
                if v == 5 {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::int(v)
                }
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn theta_is_galois(pts in distinct_points(3), n in 2u64..=5, dihedral in any::<bool>()) {
        let marks = if dihedral {
            vec![(proj_to_point(&pts[0]), 2), (proj_to_point(&pts[1]), 2), (proj_to_point(&pts[2]), n)]
        } else {
            vec![(proj_to_point(&pts[0]), n), (proj_to_point(&pts[1]), n)]
        };
        let o = Orbifold::new(marks, BITS).unwrap();
        let t = theta_for(&o, BITS).unwrap();
        prop_assert_eq!(t.deck_order, t.theta.degree());
        let order = monodromy(&t.theta, BITS).unwrap().group_order;
        prop_assert_eq!(order.to_usize(), Some(t.theta.degree()));
        prop_assert!(branch_orbifold(&MapData::new(&t.theta, BITS).unwrap()).unwrap().same(&o, BITS).unwrap());
    }
}

// ---- orbits ----

/// Rational roots of an integer polynomial by the rational root theorem,
/// enumerating divisors directly; `None` when the coefficients are too big.
fn divisor_roots(c: &[BigInt]) -> Option<Vec<Rational>> {
    let divisors = |v: &BigInt| -> Option<Vec<i64>> {
        let v = v.abs().to_i64()?;
        if v > 1_000_000_000 {
            return None;
        }
        let mut out = Vec::new();
        let mut d = 1;
        while d * d <= v {
            if v % d == 0 {
                out.push(d);
                out.push(v / d);
            }
            d += 1;
        }
        Some(out)
    };
    let shift = c.iter().take_while(|x| x.is_zero()).count();
    let c = &c[shift..];
    let mut out = if shift > 0 {
        vec![Rational::zero()]
    } else {
        Vec::new()
    };
    if c.len() <= 1 {
        return Some(out);
    }
    let (rs, ss) = (divisors(&c[0])?, divisors(c.last().unwrap())?);
    for &r in &rs {
        for &s in &ss {
            for sign in [1, -1] {
                let x = Rational::new(BigInt::from(sign * r), BigInt::from(s));
                let val = c.iter().rev().fold(Rational::zero(), |acc, a| {
                    acc * &x + Rational::from_integer(a.clone())
                });
                if val.is_zero() && !out.contains(&x) {
                    out.push(x);
                }
            }
        }
    }
    Some(out)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn orbit_membership_matches_oracles(a in map_of_degree(2, 2), u in map_of_degree(2, 2), x0 in -3i64..=3) {
        let x0 = ProjPoint::int(x0);
        let r = orbit_scan(&a, &u, &x0, 5, 1 << 20).unwrap();
        let mut x = x0.clone();
        for n in 0..=r.reached {
            let value = r.value(n).to_proj();
            prop_assert_eq!(&value, &x, "orbit value {} differs from repeated evaluation", n);
            prop_assert_eq!(&value, &a.iterate(n).unwrap().eval(&x0));
            match &r.witnesses[n] {
                Some(y) => prop_assert_eq!(u.eval(&y.to_proj()), value.clone()),
                None => {
                    prop_assert!(u.value_at_infinity() != value);
                    // q·num(y) − p·den(y) scaled to integer coefficients
                    let h = match &value {
                        ProjPoint::Infinity => u.den().clone(),
                        ProjPoint::Finite(c) => u.num() - &u.den().scale(c),
                    };
                    let l = h.coeffs().iter().fold(BigInt::from(1), |acc, c| acc.lcm(c.denom()));
                    let ints: Vec<BigInt> = h.coeffs().iter().map(|c| (c * Rational::from_integer(l.clone())).to_integer()).collect();
                    if let Some(roots) = divisor_roots(&ints) {
                        prop_assert!(roots.is_empty(), "non-member {} has rational preimages {:?}", n, roots);
                    }
                }
            }
            x = a.eval(&x);
        }
    }

    #[test]
    fn fit_is_idempotent(
        prefix in prop::collection::vec(any::<bool>(), 0..=5),
        cycle in prop::collection::vec(any::<bool>(), 1..=4),
        reps in 4usize..=8,
    ) {
        let mut m = prefix.clone();
        for _ in 0..reps {
            m.extend_from_slice(&cycle);
        }
        let fit = progression_fit(&m);
        prop_assert!((0..m.len()).all(|n| fit.contains(n) == m[n]));
        if fit.status == FitStatus::ExactOnWindow {
            let again: Vec<bool> = (0..m.len()).map(|n| fit.contains(n)).collect();
            let refit = progression_fit(&again);
            prop_assert_eq!((refit.preperiod, refit.period), (fit.preperiod, fit.period));
        }
    }
}
