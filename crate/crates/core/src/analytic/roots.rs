//! Simultaneous (Aberth–Ehrlich) root finding with a precision ladder.
//!
//! A root set is accepted only when every approximation z has an inclusion
//! disk of radius n·|p(z)|/|p′(z)| (plus evaluation rounding) and all disks
//! are pairwise separated by [`SAFETY`]. Disjoint inclusion disks, one per
//! root, each contain exactly one root.

use num_complex::Complex;
use serde::Serialize;

use super::bigfloat::{F128, F256, F512};
use super::real::{c_to_f64, cabs, Real};
use crate::error::{Error, Result};
use crate::funcalg::{Field, Poly};

/// Separation factor between inclusion disks.
pub const SAFETY: f64 = 1e3;

/// A disk {z : |z − center| ≤ radius} known to contain the value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComplexApprox {
    pub re: f64,
    pub im: f64,
    pub radius: f64,
}

impl ComplexApprox {
    pub fn new(z: Complex<f64>, radius: f64) -> Self {
        ComplexApprox {
            re: z.re,
            im: z.im,
            radius,
        }
    }

    pub fn exact(z: Complex<f64>) -> Self {
        Self::new(z, 0.0)
    }

    pub fn center(&self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }

    pub fn dist(&self, other: &ComplexApprox) -> f64 {
        (self.center() - other.center()).norm()
    }

    pub fn overlaps(&self, other: &ComplexApprox) -> bool {
        self.dist(other) <= self.radius + other.radius
    }

    pub fn separated(&self, other: &ComplexApprox) -> bool {
        self.dist(other) > SAFETY * (self.radius + other.radius)
    }

    pub fn contains(&self, z: Complex<f64>) -> bool {
        (z - self.center()).norm() <= self.radius
    }
}

/// One root with its multiplicity.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootApprox {
    pub approx: ComplexApprox,
    pub multiplicity: usize,
}

/// Anything that can hand out its coefficients (lowest degree first) at a
/// requested working precision.
pub trait CoeffSource: Sync {
    fn degree(&self) -> usize;
    fn coeffs<R: Real>(&self) -> Vec<Complex<R>>;
}

impl<K: Field> CoeffSource for Poly<K> {
    fn degree(&self) -> usize {
        self.deg()
    }

    fn coeffs<R: Real>(&self) -> Vec<Complex<R>> {
        self.coeffs().iter().map(|c| c.to_complex::<R>()).collect()
    }
}

/// P(z) − w·Q(z) for a complex w given in f64 (exactly representable at
/// every rung of the ladder).
pub struct Pencil<'a, K: Field> {
    pub num: &'a Poly<K>,
    pub den: &'a Poly<K>,
    pub w: Complex<f64>,
}

impl<K: Field> CoeffSource for Pencil<'_, K> {
    fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    fn coeffs<R: Real>(&self) -> Vec<Complex<R>> {
        let n = self.degree();
        let w = Complex::new(R::from_f64(self.w.re), R::from_f64(self.w.im));
        let mut out: Vec<Complex<R>> = (0..=n)
            .map(|i| {
                self.num.coeff(i).to_complex::<R>()
                    - w.clone() * self.den.coeff(i).to_complex::<R>()
            })
            .collect();
        while out.len() > 1 && out.last().is_some_and(|c| c.re.is_zero() && c.im.is_zero()) {
            out.pop();
        }
        out
    }
}

/// All roots of a square-free coefficient source, climbing the ladder from
/// the first rung with at least `min_bits` of precision.
pub fn roots_squarefree<S: CoeffSource>(src: &S, min_bits: u32) -> Result<Vec<ComplexApprox>> {
    let n = src.coeffs::<f64>().len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut guess: Option<Vec<Complex<f64>>> = None;
    let mut last_err = String::new();
    if min_bits > 64 {
        // cheap warm start for the expensive rungs
        guess = Some(match attempt::<f64, S>(src, None) {
            Ok(found) => found.iter().map(|a| a.center()).collect(),
            Err((best, _)) => best,
        });
    }
    macro_rules! rung {
        ($t:ty, $bits:expr) => {
            if $bits >= min_bits {
                match attempt::<$t, S>(src, guess.as_deref()) {
                    Ok(found) => return Ok(found),
                    Err((best, why)) => {
                        guess = Some(best);
                        last_err = why;
                    }
                }
            }
        };
    }
    rung!(f64, 64);
    rung!(F128, 128);
    rung!(F256, 256);
    rung!(F512, 512);
    let _ = guess;
    Err(Error::Precision(format!(
        "cannot certify the {n} roots of a polynomial at 512 bits: {last_err}"
    )))
}

/// Roots of an exact polynomial with multiplicities from its square-free
/// decomposition.
pub fn roots<K: Field>(p: &Poly<K>, min_bits: u32) -> Result<Vec<RootApprox>> {
    assert!(!p.is_zero(), "roots of the zero polynomial");
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for approx in roots_squarefree(&factor, min_bits)? {
            out.push(RootApprox {
                approx,
                multiplicity: mult,
            });
        }
    }
    for i in 0..out.len() {
        for j in 0..i {
            if !out[i].approx.separated(&out[j].approx) {
                return Err(Error::Precision(
                    "roots of distinct square-free factors are not separated".into(),
                ));
            }
        }
    }
    Ok(out)
}

fn initial_guesses(c: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let n = c.len() - 1;
    let lead = c[n].norm();
    // Fujiwara-style radius: max |a_k/a_n|^(1/(n−k))
    let mut radius = 0.0f64;
    for (k, a) in c.iter().enumerate().take(n) {
        let m = a.norm() / lead;
        if m > 0.0 {
            radius = radius.max(m.powf(1.0 / (n - k) as f64));
        }
    }
    if !(radius.is_finite() && radius > 0.0) {
        radius = 1.0;
    }
    (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex::from_polar(radius, t)
        })
        .collect()
}

fn horner<R: Real>(c: &[Complex<R>], z: &Complex<R>) -> (Complex<R>, Complex<R>) {
    let zero = Complex::new(R::zero(), R::zero());
    let (mut p, mut dp) = (zero.clone(), zero);
    for a in c.iter().rev() {
        dp = dp * z.clone() + p.clone();
        p = p * z.clone() + a.clone();
    }
    (p, dp)
}

type Attempt = std::result::Result<Vec<ComplexApprox>, (Vec<Complex<f64>>, String)>;

fn attempt<R: Real, S: CoeffSource>(src: &S, warm: Option<&[Complex<f64>]>) -> Attempt {
    let c: Vec<Complex<R>> = src.coeffs::<R>();
    let n = c.len() - 1;
    if n == 1 {
        let z = -(c[0].clone() / c[1].clone());
        let zf = c_to_f64(&z);
        let r = zf.norm() * 4.0 * f64::EPSILON + f64::MIN_POSITIVE;
        return Ok(vec![ComplexApprox::new(zf, r)]);
    }
    let start = match warm {
        Some(w) if w.len() == n => w.to_vec(),
        _ => {
            let cf: Vec<Complex<f64>> = c.iter().map(c_to_f64).collect();
            initial_guesses(&cf)
        }
    };
    let mut z: Vec<Complex<R>> = start
        .iter()
        .map(|v| Complex::new(R::from_f64(v.re), R::from_f64(v.im)))
        .collect();
    let eps = R::epsilon();
    let max_iter = 200 + 20 * n;
    let mut settled = 0;
    let mut prev: Option<R> = None;
    for _ in 0..max_iter {
        let mut biggest = R::zero();
        for i in 0..n {
            let (p, dp) = horner(&c, &z[i]);
            if p.re.is_zero() && p.im.is_zero() {
                continue;
            }
            let ratio = p / dp.clone();
            let mut sum = Complex::new(R::zero(), R::zero());
            for j in 0..n {
                if j != i {
                    let d = z[i].clone() - z[j].clone();
                    if !(d.re.is_zero() && d.im.is_zero()) {
                        sum = sum + Complex::new(R::one(), R::zero()) / d;
                    }
                }
            }
            let denom = Complex::new(R::one(), R::zero()) - ratio.clone() * sum;
            let step = if denom.re.is_zero() && denom.im.is_zero() {
                ratio
            } else {
                ratio / denom
            };
            let size = cabs(&step);
            let scale = cabs(&z[i]).max_of(R::one());
            let rel = size / scale;
            if rel > biggest {
                biggest = rel;
            }
            z[i] = z[i].clone() - step;
        }
        if biggest <= eps.clone() * R::from_int(8) {
            settled += 1;
            if settled >= 2 {
                break;
            }
        }
        // steps no longer shrinking: either at the rounding floor or still
        // wandering; certification tells which
        let stalled = prev
            .as_ref()
            .is_some_and(|p| biggest.clone() * R::from_int(2) >= p.clone());
        if stalled {
            if let Ok(found) = certify(&c, &z) {
                return Ok(found);
            }
        }
        prev = Some(biggest);
    }
    let best: Vec<Complex<f64>> = z.iter().map(c_to_f64).collect();
    match certify(&c, &z) {
        Ok(found) => Ok(found),
        Err(why) => Err((best, why)),
    }
}

fn certify<R: Real>(
    c: &[Complex<R>],
    z: &[Complex<R>],
) -> std::result::Result<Vec<ComplexApprox>, String> {
    let n = z.len();
    let eps = R::epsilon();
    let nn = R::from_int(n as i64);
    let mut out = Vec::with_capacity(n);
    for zi in z {
        let (p, dp) = horner(c, zi);
        let az = cabs(zi);
        // rounding bound for Horner: 2n·ε·Σ|a_k||z|^k
        let mut mag = R::zero();
        for a in c.iter().rev() {
            mag = mag * az.clone() + cabs(a);
        }
        let round = mag * eps.clone() * R::from_int(2 * n as i64 + 2);
        let dpa = cabs(&dp);
        if dpa.is_zero() {
            return Err("vanishing derivative at an approximation".into());
        }
        let r = nn.clone() * (cabs(&p) + round) / dpa;
        let center = c_to_f64(zi);
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err("approximation outside the f64 range".into());
        }
        // account for rounding the center to f64
        let radius =
            r.to_f64() * (1.0 + 1e-9) + center.norm() * 2.0 * f64::EPSILON + f64::MIN_POSITIVE;
        out.push(ComplexApprox::new(center, radius));
    }
    for i in 0..n {
        for j in 0..i {
            if !out[i].separated(&out[j]) {
                return Err(format!(
                    "approximations {i} and {j} not separated (distance {:e}, radii {:e}, {:e})",
                    out[i].dist(&out[j]),
                    out[i].radius,
                    out[j].radius
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::Rational;

    type P = Poly<Rational>;

    #[test]
    fn unit_roots() {
        let r = roots(&P::from_ints(&[-1, 0, 1]), 64).unwrap();
        let mut re: Vec<f64> = r.iter().map(|x| x.approx.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
        assert!(r.iter().all(|x| x.multiplicity == 1));
    }

    #[test]
    fn double_root() {
        let p = P::from_ints(&[3, 4]).pow(2);
        let r = roots(&p, 64).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert!((r[0].approx.re + 0.75).abs() < 1e-12);
    }

    #[test]
    fn vieta_product() {
        let p = P::from_ints(&[9, 0, 88, 0, 16]);
        let r = roots(&p, 64).unwrap();
        assert_eq!(r.len(), 4);
        let prod = r
            .iter()
            .fold(Complex::new(1.0, 0.0), |acc, x| acc * x.approx.center());
        assert!((prod - Complex::new(9.0 / 16.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn clustered_roots_climb_the_ladder() {
        // (z − 1)(z − 1 − 10⁻²⁰): f64 cannot separate the pair
        let e = Rational::new(1.into(), num_bigint::BigInt::from(10).pow(20));
        let one = Rational::from_int(1);
        let p = &P::linear_root(one.clone()) * &P::linear_root(one + e);
        assert!(matches!(roots(&p, 64), Err(Error::Precision(_))));
        let q = &P::linear_root(Rational::from_int(1))
            * &P::linear_root(Rational::new(1000001.into(), 1000000.into()));
        assert_eq!(roots(&q, 64).unwrap().len(), 2);
        let r = roots(&q, 128).unwrap();
        assert!(r.iter().all(|x| x.approx.radius < 1e-12));
    }

    #[test]
    fn bigfloat_rung_runs() {
        let p = P::from_ints(&[-2, 0, 0, 1]);
        let r = roots(&p, 256).unwrap();
        assert_eq!(r.len(), 3);
        for x in &r {
            let z = x.approx.center();
            assert!((z * z * z - 2.0).norm() < 1e-12);
        }
    }
}
