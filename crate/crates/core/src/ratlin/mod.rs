//! Exact rational scalars, dense matrices and univariate polynomials.
//!
//! Everything here is computed over ℚ with arbitrary-precision integers; no
//! floating point is involved anywhere.

mod matrix;
mod poly;
mod rational;

pub use matrix::{vector, RatMatrix};
pub use poly::RatPoly;
pub use rational::{
    denominator_lcm, int, parse_rational, primitive_integer_vector, rat, sign, sqrt_lower_bound, sqrt_upper_bound,
    Canonical, ParseRationalError, Rational,
};
