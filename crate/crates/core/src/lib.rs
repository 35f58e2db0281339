//! Orbifold calculus for rational maps of the Riemann sphere.

pub mod analytic;
pub mod decomp;
pub mod error;
pub mod fibercurve;
pub mod funcalg;
pub mod lattes;
pub mod orbifold;
pub mod orbits;

pub use error::{Error, Result};
pub use funcalg::{Field, Rational, Scalar};

/// Polynomials and rational functions over ℚ.
pub type QPoly = funcalg::Poly<Rational>;
pub type QRatFunc = funcalg::RatFunc<Rational>;
/// Polynomials and rational functions over a quadratic field ℚ(√d).
pub type KPoly = funcalg::Poly<Scalar>;
pub type KRatFunc = funcalg::RatFunc<Scalar>;
pub type KPoint = funcalg::ProjPoint<Scalar>;
pub type KMobius = funcalg::Mobius<Scalar>;
