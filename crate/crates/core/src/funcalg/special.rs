//! Chebyshev polynomials T_n, power maps Z_n = zⁿ and D_n = (zⁿ + z⁻ⁿ)/2.

use super::field::Field;
use super::poly::Poly;
use super::ratfunc::RatFunc;

/// T_n by the recurrence T_{k+1} = 2z·T_k − T_{k−1}; T_0 = 1.
pub fn chebyshev_poly<K: Field>(n: usize) -> Poly<K> {
    let two_z = Poly::monomial(K::from_int(2), 1);
    let (mut prev, mut cur) = (Poly::one(), Poly::x());
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = &(&two_z * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

pub fn chebyshev<K: Field>(n: usize) -> RatFunc<K> {
    RatFunc::from_poly(chebyshev_poly(n))
}

pub fn power<K: Field>(n: usize) -> RatFunc<K> {
    RatFunc::from_poly(Poly::monomial(K::one(), n))
}

/// (z^(2n) + 1) / (2zⁿ)
pub fn dfunc<K: Field>(n: usize) -> RatFunc<K> {
    let mut num = vec![K::zero(); 2 * n + 1];
    num[0] = K::one();
    num[2 * n] = K::one();
    RatFunc::new(Poly::new(num), Poly::monomial(K::from_int(2), n))
        .expect("monomial denominator is nonzero")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcalg::field::Rational;

    type Q = RatFunc<Rational>;

    #[test]
    fn small_cases() {
        assert_eq!(
            chebyshev::<Rational>(2).num(),
            &Poly::from_ints(&[-1, 0, 2])
        );
        assert_eq!(
            chebyshev::<Rational>(4).num(),
            &Poly::from_ints(&[1, 0, -8, 0, 8])
        );
        assert_eq!(dfunc::<Rational>(1).to_string(), "(1/2*z^2 + 1/2)/z");
    }

    #[test]
    fn chebyshev_composes_multiplicatively() {
        let t6: Q = chebyshev(2).compose(&chebyshev(3)).unwrap();
        assert_eq!(t6, chebyshev(6));
        // T₄ = 2T₂² − 1
        let t2 = chebyshev_poly::<Rational>(2);
        let t4 = &(&t2 * &t2).scale(&Rational::from_int(2)) - &Poly::one();
        assert_eq!(t4, chebyshev_poly(4));
    }

    #[test]
    fn chebyshev_intertwines_dfunc() {
        for m in 1..5 {
            for s in 1..4 {
                let lhs: Q = chebyshev(m).compose(&dfunc(s)).unwrap();
                let rhs: Q = dfunc(s).compose(&power(m)).unwrap();
                assert_eq!(lhs, rhs, "m = {m}, s = {s}");
            }
        }
    }

    #[test]
    fn chebyshev_cosine_identity() {
        for n in 0..8 {
            let t = chebyshev_poly::<Rational>(n);
            for k in 0..5 {
                let x = 0.37 * k as f64;
                let v: f64 = t.coeffs().iter().rev().fold(0.0, |acc, c| {
                    acc * x.cos() + crate::analytic::real::rational_to_f64(c)
                });
                assert!((v - (n as f64 * x).cos()).abs() < 1e-9);
            }
        }
    }
}
