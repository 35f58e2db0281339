//! Exact univariate algebra over ℚ and ℚ(√d).

pub mod field;
pub mod mobius;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod scalar;
pub mod special;

pub use field::{Field, Rational};
pub use mobius::{conjugate, Mobius};
pub use parse::{parse, parse_point, print};
pub use poly::Poly;
pub use ratfunc::{ProjPoint, RatFunc, DEFAULT_DEGREE_CAP};
pub use scalar::Scalar;
pub use special::{chebyshev, dfunc, power};
