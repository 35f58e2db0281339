//! Exact orbit scans over ℚ: for which n does A°ⁿ(x₀) lie in U(ℙ¹(ℚ)), and
//! which union of arithmetic progressions fits the answer.

pub mod big;

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::funcalg::{ProjPoint, RatFunc, Rational};
pub use big::{BigPoint, IntForm, Preimager};

/// Orbit values above this height stop the scan.
pub const DEFAULT_HEIGHT_CAP_BITS: u64 = 1 << 26;
/// Largest horizon accepted.
pub const MAX_HORIZON: usize = 10_000;
/// Values and witnesses taller than this are summarized in JSON.
pub const DISPLAY_BITS: u64 = 4096;

#[derive(Clone, Debug)]
pub struct PreimageQuery {
    pub target: ProjPoint<Rational>,
    pub solutions: Vec<ProjPoint<Rational>>,
}

/// Every y ∈ ℙ¹(ℚ) with U(y) = c.
pub fn rational_preimages(u: &RatFunc<Rational>, c: &ProjPoint<Rational>) -> Result<PreimageQuery> {
    if u.is_constant() {
        return Err(Error::Precondition(
            "preimages need a nonconstant map".into(),
        ));
    }
    let sols = Preimager::new(u).solve(&BigPoint::from_proj(c))?;
    Ok(PreimageQuery {
        target: c.clone(),
        solutions: sols.iter().map(BigPoint::to_proj).collect(),
    })
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub a: RatFunc<Rational>,
    pub u: RatFunc<Rational>,
    pub x0: ProjPoint<Rational>,
    /// Requested horizon N.
    pub horizon: usize,
    /// Membership is known for n ∈ [0, reached].
    pub reached: usize,
    /// Distinct orbit values in order; with a cycle the orbit repeats them.
    pub values: Vec<BigPoint>,
    /// Exact cycle of the orbit: (first repeated index, period).
    pub cycle: Option<(usize, usize)>,
    pub membership: Vec<bool>,
    /// For each n ≤ reached, a y with U(y) = A°ⁿ(x₀) when one exists.
    pub witnesses: Vec<Option<BigPoint>>,
    /// Why the scan stopped before the horizon.
    pub stopped: Option<String>,
}

impl OrbitReport {
    pub fn members(&self) -> Vec<usize> {
        (0..self.membership.len())
            .filter(|&n| self.membership[n])
            .collect()
    }

    /// Index into `values` of A°ⁿ(x₀).
    pub fn value_index(&self, n: usize) -> usize {
        match self.cycle {
            Some((start, period)) if n >= start => start + (n - start) % period,
            _ => n,
        }
    }

    pub fn value(&self, n: usize) -> &BigPoint {
        &self.values[self.value_index(n)]
    }
}

/// Scans n = 0..=N. Values come from repeated evaluation of A, never from
/// the iterate; an exactly repeated value ends the computation and the
/// cycle supplies the rest.
pub fn orbit_scan(
    a: &RatFunc<Rational>,
    u: &RatFunc<Rational>,
    x0: &ProjPoint<Rational>,
    horizon: usize,
    height_cap_bits: u64,
) -> Result<OrbitReport> {
    if a.is_constant() || u.is_constant() {
        return Err(Error::Precondition(
            "orbit scans need nonconstant A and U".into(),
        ));
    }
    if horizon > MAX_HORIZON {
        return Err(Error::Precondition(format!(
            "horizon {horizon} exceeds {MAX_HORIZON}"
        )));
    }
    let form = IntForm::new(a);
    let mut values = vec![BigPoint::from_proj(x0)];
    let mut seen: HashMap<BigPoint, usize> = HashMap::from([(values[0].clone(), 0)]);
    let mut cycle = None;
    let mut stopped = None;
    let mut reached = 0;
    while reached < horizon {
        let next = form.eval(values.last().expect("nonempty"));
        if let Some(&j) = seen.get(&next) {
            cycle = Some((j, values.len() - j));
            reached = horizon;
            break;
        }
        if next.height_bits() > height_cap_bits {
            stopped = Some(format!(
                "orbit value {} has height {} bits, above the cap of {height_cap_bits}",
                values.len(),
                next.height_bits()
            ));
            break;
        }
        seen.insert(next.clone(), values.len());
        values.push(next);
        reached += 1;
    }
    let solver = Preimager::new(u);
    let solved: Vec<Result<Vec<BigPoint>>> = values.par_iter().map(|v| solver.solve(v)).collect();
    let mut per_value = Vec::with_capacity(values.len());
    for (i, r) in solved.into_iter().enumerate() {
        match r {
            Ok(s) => per_value.push(s.into_iter().next()),
            // value i is A°ⁱ(x₀); everything before it is settled
            Err(e) if e.is_resource() && i > 0 => {
                reached = i - 1;
                cycle = None;
                stopped = Some(format!("membership of orbit value {i}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let mut report = OrbitReport {
        a: a.clone(),
        u: u.clone(),
        x0: x0.clone(),
        horizon,
        reached,
        values,
        cycle,
        membership: Vec::new(),
        witnesses: Vec::new(),
        stopped,
    };
    report.values.truncate(per_value.len());
    for n in 0..=report.reached {
        let w = per_value[report.value_index(n)].clone();
        report.membership.push(w.is_some());
        report.witnesses.push(w);
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FitStatus {
    /// The pattern reproduces every bit of the scanned window.
    ExactOnWindow,
    /// No period R ≤ N/3 fits.
    Inconclusive,
}

/// {start + k·step : k ≥ 0}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Progression {
    pub start: usize,
    pub step: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProgressionFit {
    pub preperiod: usize,
    pub period: usize,
    pub singletons: Vec<usize>,
    pub classes: Vec<Progression>,
    pub status: FitStatus,
}

impl ProgressionFit {
    /// Whether n belongs to the fitted set.
    pub fn contains(&self, n: usize) -> bool {
        self.singletons.contains(&n)
            || self
                .classes
                .iter()
                .any(|c| n >= c.start && (n - c.start).is_multiple_of(c.step))
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.singletons.iter().map(|n| format!("{{{n}}}")).collect();
        parts.extend(
            self.classes
                .iter()
                .map(|c| format!("{} mod {} (from {})", c.start % c.step, c.step, c.start)),
        );
        if parts.is_empty() {
            "{}".to_string()
        } else {
            parts.join(", ")
        }
    }
}

/// Smallest period R ≤ N/3, with the least preperiod s for it, such that
/// membership is R-periodic on [s, N] and that window spans three periods.
pub fn progression_fit(membership: &[bool]) -> ProgressionFit {
    let len = membership.len();
    let last = len.saturating_sub(1);
    for r in 1..=last / 3 {
        // least s with m[n] = m[n + r] whenever s ≤ n and n + r ≤ N
        let mut s = len - r;
        while s > 0 && membership[s - 1] == membership[s - 1 + r] {
            s -= 1;
        }
        if len - s < 3 * r {
            continue;
        }
        let mut classes = Vec::new();
        for res in 0..r {
            // members of this residue class from s on
            let first = (s..s + r)
                .find(|n| n % r == res)
                .expect("residue in window");
            if !membership[first] {
                continue;
            }
            let mut start = first;
            while start >= r && membership[start - r] {
                start -= r;
            }
            classes.push(Progression { start, step: r });
        }
        classes.sort_by_key(|c| c.start);
        let mut fit = ProgressionFit {
            preperiod: s,
            period: r,
            singletons: Vec::new(),
            classes,
            status: FitStatus::ExactOnWindow,
        };
        fit.singletons = (0..s)
            .filter(|&n| membership[n] && !fit.contains(n))
            .collect();
        debug_assert!((0..len).all(|n| fit.contains(n) == membership[n]));
        return fit;
    }
    ProgressionFit {
        preperiod: len,
        period: 0,
        singletons: (0..len).filter(|&n| membership[n]).collect(),
        classes: Vec::new(),
        status: FitStatus::Inconclusive,
    }
}

#[derive(Serialize)]
pub struct OrbitJson {
    pub a: String,
    pub u: String,
    pub x0: String,
    pub horizon: usize,
    pub reached: usize,
    pub members: Vec<usize>,
    pub membership: String,
    pub values: Vec<String>,
    pub witnesses: Vec<Option<String>>,
    pub cycle: Option<(usize, usize)>,
    pub fit: ProgressionFit,
    pub fit_text: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stopped: Option<String>,
}

impl OrbitReport {
    pub fn to_json(&self) -> OrbitJson {
        let fit = progression_fit(&self.membership);
        OrbitJson {
            a: self.a.to_expr(),
            u: self.u.to_expr(),
            x0: self.x0.to_expr(),
            horizon: self.horizon,
            reached: self.reached,
            members: self.members(),
            membership: self
                .membership
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect(),
            values: (0..=self.reached)
                .map(|n| self.value(n).display(DISPLAY_BITS))
                .collect(),
            witnesses: self
                .witnesses
                .iter()
                .map(|w| w.as_ref().map(|y| y.display(DISPLAY_BITS)))
                .collect(),
            cycle: self.cycle,
            fit_text: fit.describe(),
            fit,
            stopped: self.stopped.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::field::{int, rat};
    use crate::funcalg::{power, Poly};

    fn q(num: &[i64], den: &[i64]) -> RatFunc<Rational> {
        RatFunc::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
    }

    #[test]
    fn preimage_examples() {
        let z2: RatFunc<Rational> = power(2);
        let r = rational_preimages(&z2, &ProjPoint::Finite(int(9))).unwrap();
        assert_eq!(
            r.solutions,
            vec![ProjPoint::Finite(int(3)), ProjPoint::Finite(int(-3))]
        );
        let r = rational_preimages(&z2, &ProjPoint::Infinity).unwrap();
        assert_eq!(r.solutions, vec![ProjPoint::Infinity]);
        let r = rational_preimages(&z2, &ProjPoint::Finite(rat(3048192, 18225))).unwrap();
        assert!(r.solutions.is_empty());
    }

    #[test]
    fn worked_example_orbit_prefix() {
        let a = q(&[0, 432, 144], &[81, -18, 1]);
        let r = orbit_scan(
            &a,
            &power(2),
            &ProjPoint::Finite(int(1)),
            15,
            DEFAULT_HEIGHT_CAP_BITS,
        )
        .unwrap();
        assert_eq!(r.members(), vec![0, 1, 2, 3, 5, 7, 9, 11, 13, 15]);
        assert_eq!(r.value(4).to_proj(), ProjPoint::Finite(rat(3048192, 18225)));
        // repeated evaluation agrees with the iterate
        for n in 0..=5 {
            let direct = a.iterate(n).unwrap().eval(&ProjPoint::Finite(int(1)));
            assert_eq!(r.value(n).to_proj(), direct);
        }
        for (n, w) in r.witnesses.iter().enumerate() {
            if let Some(y) = w {
                assert!(IntForm::new(&power(2)).maps_to(y, r.value(n)));
            }
        }
    }

    #[test]
    fn preperiodic_orbits() {
        let r = orbit_scan(
            &power(2),
            &power(3),
            &ProjPoint::Finite(int(1)),
            40,
            DEFAULT_HEIGHT_CAP_BITS,
        )
        .unwrap();
        assert!(r.membership.iter().all(|&b| b));
        assert_eq!(r.cycle, Some((0, 1)));
        assert_eq!(r.membership.len(), 41);
        let r = orbit_scan(
            &power(2),
            &power(2),
            &ProjPoint::Finite(int(2)),
            8,
            DEFAULT_HEIGHT_CAP_BITS,
        )
        .unwrap();
        assert_eq!(r.members(), (1..=8).collect::<Vec<_>>());
    }

    #[test]
    fn height_cap_stops_honestly() {
        let r = orbit_scan(&power(2), &power(2), &ProjPoint::Finite(int(3)), 30, 64).unwrap();
        assert!(r.stopped.is_some());
        assert!(r.reached < 30);
        assert_eq!(r.membership.len(), r.reached + 1);
    }

    #[test]
    fn fits() {
        let worked: Vec<bool> = (0..=31).map(|n| n == 0 || n == 2 || n % 2 == 1).collect();
        let f = progression_fit(&worked);
        assert_eq!(f.singletons, vec![0, 2]);
        assert_eq!(f.classes, vec![Progression { start: 1, step: 2 }]);
        assert_eq!(f.status, FitStatus::ExactOnWindow);
        let all = vec![true; 20];
        let f = progression_fit(&all);
        assert_eq!(f.classes, vec![Progression { start: 0, step: 1 }]);
        assert!(f.singletons.is_empty());
        let one: Vec<bool> = (0..=30).map(|n| n == 4).collect();
        let f = progression_fit(&one);
        assert_eq!(f.singletons, vec![4]);
        assert!(f.classes.is_empty());
        // no period up to N/3
        let noisy: Vec<bool> = (0..=9).map(|n| [1, 2, 4, 8].contains(&n)).collect();
        assert_eq!(progression_fit(&noisy).status, FitStatus::Inconclusive);
    }

    #[test]
    fn fit_is_idempotent() {
        let worked: Vec<bool> = (0..=31).map(|n| n == 0 || n == 2 || n % 2 == 1).collect();
        let f = progression_fit(&worked);
        let again: Vec<bool> = (0..=31).map(|n| f.contains(n)).collect();
        let g = progression_fit(&again);
        assert_eq!((g.preperiod, g.period), (f.preperiod, f.period));
    }
}
