//! Analytic continuation of fibers of a rational map along closed loops, and
//! the canonical loop system around a set of branch values.
//!
//! A fiber f⁻¹(w) = {z : P(z) − w·Q(z) = 0} is followed along a polyline in
//! the w-plane by an Euler predictor (dz/dw = Q/(P′ − wQ′)) and a Newton
//! corrector. A step is accepted only when every point stays well inside its
//! own basin: the predicted move and the first Newton correction are small
//! against the distance to the nearest other sheet. Failing that, the step
//! is halved; below the minimum step the whole track is retried one rung up
//! the precision ladder.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::bigfloat::{F128, F256, F512};
use super::real::{c_from_f64, c_to_f64, cabs, Real};
use super::roots::{roots_squarefree, ComplexApprox, Pencil};
use crate::error::{Error, Result};
use crate::funcalg::{Field, Poly, RatFunc};

/// Points per full small circle and per outer circle.
const CIRCLE_SIDES: usize = 64;
const OUTER_SIDES: usize = 256;
/// Small-circle radius as a fraction of the distance to the nearest other
/// special point.
const CIRCLE_FRACTION: f64 = 0.3;
const MIN_STEP: f64 = 1e-10;
/// Newton corrections this many tolerances wide count as converged once
/// they stop shrinking.
const NEWTON_SLACK: i64 = 1 << 12;
const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

/// The induced permutation of one fiber along one loop.
#[derive(Clone, Debug, Serialize)]
pub struct FiberTrack {
    /// Closed polyline in the target plane.
    pub path: Vec<Complex<f64>>,
    pub start: Vec<ComplexApprox>,
    /// Sheet i ends on sheet `permutation[i]`.
    pub permutation: Vec<usize>,
}

/// Loops from a common base point around each branch value, plus the outer
/// circle through the base point (a loop around ∞).
#[derive(Clone, Debug)]
pub struct LoopSystem {
    pub base: Complex<f64>,
    pub centers: Vec<Complex<f64>>,
    /// `loops[i]` encircles `centers[i]` counterclockwise.
    pub loops: Vec<Vec<Complex<f64>>>,
    /// Counterclockwise circle |w| = |base|, enclosing every finite point.
    pub outer: Vec<Complex<f64>>,
    /// Indices of `loops` in the order whose product is the outer loop.
    pub order: Vec<usize>,
}

impl LoopSystem {
    /// `centers` get loops; `obstacles` (such as f(∞), where a sheet passes
    /// through ∞) are only kept away from.
    pub fn new(centers: &[Complex<f64>], obstacles: &[Complex<f64>]) -> Result<Self> {
        let all: Vec<Complex<f64>> = centers.iter().chain(obstacles).copied().collect();
        let reach = all.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let big = 2.0 * (1.0 + reach);
        let nearest: Vec<f64> = (0..all.len())
            .map(|i| {
                all.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, v)| (*v - all[i]).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        if nearest.iter().any(|r| r.is_nan() || *r <= 0.0) {
            return Err(Error::Tracking("branch values are not separated".into()));
        }
        // segments must miss every other disk; shrink the disks if no base
        // angle works
        let mut found = None;
        'fractions: for fraction in [
            CIRCLE_FRACTION,
            CIRCLE_FRACTION / 2.0,
            CIRCLE_FRACTION / 4.0,
        ] {
            let radius: Vec<f64> = nearest.iter().map(|d| (fraction * d).min(0.5)).collect();
            for k in 0..512 {
                let b = Complex::from_polar(big, 0.3 + GOLDEN_ANGLE * k as f64);
                let clear = (0..centers.len()).all(|i| {
                    let entry = entry_point(b, centers[i], radius[i]);
                    (0..all.len())
                        .filter(|&j| j != i)
                        .all(|j| segment_distance(all[j], b, entry) > 1.2 * radius[j])
                });
                if clear {
                    found = Some((b, radius));
                    break 'fractions;
                }
            }
        }
        let (base, radius) = found.ok_or_else(|| {
            Error::Tracking("no admissible base point for the loop system".into())
        })?;
        let loops = (0..centers.len())
            .map(|i| {
                let entry = entry_point(base, centers[i], radius[i]);
                let mut path = vec![base];
                path.extend(circle(centers[i], entry, CIRCLE_SIDES));
                path.push(base);
                path
            })
            .collect();
        let outer = circle(Complex::new(0.0, 0.0), base, OUTER_SIDES);
        // loops sorted by increasing angle seen from the base point (facing
        // the origin) compose, first to last, to the outer circle
        let inward = -base;
        let mut order: Vec<usize> = (0..centers.len()).collect();
        let angle = |i: usize| ((centers[i] - base) / inward).arg();
        order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
        Ok(LoopSystem {
            base,
            centers: centers.to_vec(),
            loops,
            outer,
            order,
        })
    }
}

fn entry_point(base: Complex<f64>, v: Complex<f64>, r: f64) -> Complex<f64> {
    let d = base - v;
    v + d * (r / d.norm())
}

/// Closed counterclockwise polygon around `center` starting and ending at
/// `start`.
fn circle(center: Complex<f64>, start: Complex<f64>, sides: usize) -> Vec<Complex<f64>> {
    let d = start - center;
    let mut out: Vec<Complex<f64>> = (0..sides)
        .map(|k| {
            center + d * Complex::from_polar(1.0, std::f64::consts::TAU * k as f64 / sides as f64)
        })
        .collect();
    out.push(start);
    out
}

fn segment_distance(p: Complex<f64>, a: Complex<f64>, b: Complex<f64>) -> f64 {
    let ab = b - a;
    let t = ((p - a) * ab.conj()).re / ab.norm_sqr();
    let t = t.clamp(0.0, 1.0);
    (a + ab * t - p).norm()
}

/// The fiber of f over `w`, which must not be a branch value.
pub fn fiber_at<K: Field>(
    f: &RatFunc<K>,
    w: Complex<f64>,
    bits: u32,
) -> Result<Vec<ComplexApprox>> {
    let pencil = Pencil {
        num: f.num(),
        den: f.den(),
        w,
    };
    let fib = roots_squarefree(&pencil, bits)?;
    if fib.len() != f.degree() {
        return Err(Error::Tracking("base point lies over f(∞)".into()));
    }
    Ok(fib)
}

/// Continue `start` (the full fiber over `path[0]`) along the closed
/// polyline `path`, retrying up the precision ladder on failure.
pub fn track<K: Field>(
    f: &RatFunc<K>,
    path: &[Complex<f64>],
    start: &[ComplexApprox],
    bits: u32,
) -> Result<FiberTrack> {
    if path.len() < 2 || path[0] != path[path.len() - 1] {
        return Err(Error::Invalid("loop must be a closed polyline".into()));
    }
    if start.len() != f.degree() {
        return Err(Error::Invalid("start fiber must be the full fiber".into()));
    }
    let mut last = Error::Tracking("no precision rung attempted".into());
    macro_rules! rung {
        ($t:ty, $bits:expr) => {
            if $bits >= bits {
                match track_with::<$t, K>(f.num(), f.den(), path, start) {
                    Ok(permutation) => {
                        return Ok(FiberTrack {
                            path: path.to_vec(),
                            start: start.to_vec(),
                            permutation,
                        })
                    }
                    Err(e) => last = e,
                }
            }
        };
    }
    rung!(f64, 64);
    rung!(F128, 128);
    rung!(F256, 256);
    rung!(F512, 512);
    Err(last)
}

/// Track several loops over the same start fiber in parallel.
pub fn track_all<K: Field>(
    f: &RatFunc<K>,
    loops: &[Vec<Complex<f64>>],
    start: &[ComplexApprox],
    bits: u32,
) -> Result<Vec<Vec<usize>>> {
    loops
        .par_iter()
        .map(|l| track(f, l, start, bits).map(|t| t.permutation))
        .collect()
}

struct Pencils<R: Real> {
    p: Vec<Complex<R>>,
    q: Vec<Complex<R>>,
}

impl<R: Real> Pencils<R> {
    /// P, P′, Q, Q′ at z.
    fn eval(&self, z: &Complex<R>) -> [Complex<R>; 4] {
        let (p, dp) = horner(&self.p, z);
        let (q, dq) = horner(&self.q, z);
        [p, dp, q, dq]
    }
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

fn track_with<R: Real, K: Field>(
    num: &Poly<K>,
    den: &Poly<K>,
    path: &[Complex<f64>],
    start: &[ComplexApprox],
) -> Result<Vec<usize>> {
    let pen = Pencils::<R> {
        p: num.coeffs().iter().map(|c| c.to_complex::<R>()).collect(),
        q: den.coeffs().iter().map(|c| c.to_complex::<R>()).collect(),
    };
    let tol = R::epsilon() * R::from_int(1 << 10);
    let w0: Complex<R> = c_from_f64(path[0].re, path[0].im);
    let mut z: Vec<Complex<R>> = Vec::with_capacity(start.len());
    for s in start {
        let z0 = c_from_f64::<R>(s.re, s.im);
        z.push(
            newton(&pen, z0, &w0, &tol, None)
                .ok_or_else(|| Error::Tracking("start fiber does not refine".into()))?,
        );
    }
    let n = z.len();
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        let mut t = 0.0f64;
        let mut h = 0.25f64;
        while t < 1.0 {
            let dt = h.min(1.0 - t);
            let wa = a + (b - a) * t;
            let wb = a + (b - a) * (t + dt);
            match step(&pen, &z, wa, wb, &tol) {
                Some(next) => {
                    z = next;
                    t += dt;
                    h = (h * 1.6).min(1.0);
                }
                None => {
                    h *= 0.5;
                    if h * len < MIN_STEP * (1.0 + len) {
                        return Err(Error::Tracking(format!(
                            "step collapse at w = {:.6}{:+.6}i with {}-bit arithmetic",
                            wa.re,
                            wa.im,
                            R::BITS
                        )));
                    }
                }
            }
        }
    }
    // identify end points with start points
    let centers: Vec<Complex<f64>> = start.iter().map(|s| s.center()).collect();
    let sep = min_gap(&centers);
    let mut perm = vec![usize::MAX; n];
    let mut hit = vec![false; n];
    for (i, zi) in z.iter().enumerate() {
        let zf = c_to_f64(zi);
        let (j, d) = centers
            .iter()
            .enumerate()
            .map(|(j, c)| (j, (*c - zf).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty fiber");
        if d > 0.25 * sep.max(f64::MIN_POSITIVE) || hit[j] {
            return Err(Error::Tracking(
                "end fiber does not match the start fiber".into(),
            ));
        }
        hit[j] = true;
        perm[i] = j;
    }
    Ok(perm)
}

fn min_gap(pts: &[Complex<f64>]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..pts.len() {
        for j in 0..i {
            m = m.min((pts[i] - pts[j]).norm());
        }
    }
    m
}

/// Newton on P − wQ from z. With `guard`, the first correction must stay
/// below it and the iteration must contract.
fn newton<R: Real>(
    pen: &Pencils<R>,
    mut z: Complex<R>,
    w: &Complex<R>,
    tol: &R,
    guard: Option<&R>,
) -> Option<Complex<R>> {
    let mut prev: Option<R> = None;
    for _ in 0..40 {
        let [p, dp, q, dq] = pen.eval(&z);
        let g = p - w.clone() * q;
        let dg = dp - w.clone() * dq;
        if dg.re.is_zero() && dg.im.is_zero() {
            return None;
        }
        let delta = g / dg;
        let size = cabs(&delta);
        if prev.is_none() {
            if let Some(bound) = guard {
                if size > *bound {
                    return None;
                }
            }
        }
        let scale = cabs(&z).max_of(R::one());
        if let Some(pr) = &prev {
            // quadratic convergence should at least halve the correction,
            // unless rounding (amplified by conditioning) has been reached
            if size > pr.clone() / R::from_int(2) && size > tol.clone() * scale.clone() {
                let floor = tol.clone() * R::from_int(NEWTON_SLACK) * scale;
                return (pr.clone() <= floor).then_some(z);
            }
        }
        z = z - delta;
        if size <= tol.clone() * cabs(&z).max_of(R::one()) {
            return Some(z);
        }
        prev = Some(size);
    }
    None
}

fn step<R: Real>(
    pen: &Pencils<R>,
    z: &[Complex<R>],
    wa: Complex<f64>,
    wb: Complex<f64>,
    tol: &R,
) -> Option<Vec<Complex<R>>> {
    let n = z.len();
    let wa_r: Complex<R> = c_from_f64(wa.re, wa.im);
    let wb_r: Complex<R> = c_from_f64(wb.re, wb.im);
    let dw = wb_r.clone() - wa_r.clone();
    let zf: Vec<Complex<f64>> = z.iter().map(c_to_f64).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let gap = zf
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| (*v - zf[i]).norm())
            .fold(f64::INFINITY, f64::min);
        let gap = if gap.is_finite() {
            gap
        } else {
            1.0 + zf[i].norm()
        };
        let [_, dp, q, dq] = pen.eval(&z[i]);
        let dg = dp - wa_r.clone() * dq;
        if dg.re.is_zero() && dg.im.is_zero() {
            return None;
        }
        let pred = z[i].clone() + q / dg * dw.clone();
        if (c_to_f64(&pred) - zf[i]).norm() > 0.2 * gap {
            return None;
        }
        let guard = R::from_f64(0.05 * gap);
        let next = newton(pen, pred, &wb_r, tol, Some(&guard))?;
        if (c_to_f64(&next) - zf[i]).norm() > 0.25 * gap {
            return None;
        }
        out.push(next);
    }
    Some(out)
}
