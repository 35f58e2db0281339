#![allow(dead_code)]

use orbicalc::funcalg::{Poly, RatFunc};
use orbicalc::{QRatFunc, Rational};
use rand::rngs::StdRng;
use rand::Rng;

pub fn q(num: &[i64], den: &[i64]) -> QRatFunc {
    RatFunc::new(Poly::from_ints(num), Poly::from_ints(den)).unwrap()
}

fn random_poly(rng: &mut StdRng, deg: usize) -> Poly<Rational> {
    let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-3..=3)).collect();
    while c[deg] == 0 {
        c[deg] = rng.gen_range(-3..=3);
    }
    Poly::from_ints(&c)
}

/// A rational map of exact degree `deg` with small integer coefficients;
/// about a third are polynomials.
pub fn random_map(rng: &mut StdRng, deg: usize) -> QRatFunc {
    loop {
        let polynomial = rng.gen_range(0..3) == 0;
        let (dn, dd) = if polynomial {
            (deg, 0)
        } else if rng.gen_bool(0.5) {
            (deg, rng.gen_range(0..=deg))
        } else {
            (rng.gen_range(0..=deg), deg)
        };
        let f = RatFunc::new(random_poly(rng, dn), random_poly(rng, dd)).unwrap();
        if f.degree() == deg {
            return f;
        }
    }
}
