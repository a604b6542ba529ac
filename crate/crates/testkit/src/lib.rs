#![allow(clippy::needless_range_loop)]

//! Oracles and corpus generators shared by the test suites.
//!
//! Oracles deliberately avoid the code paths they check: determinants use
//! plain fraction elimination, characteristic polynomials come from
//! interpolation, spectra from a floating-point eigensolver, and lasso
//! acceptance from long simulation.

pub mod gen;
pub mod oracle;

pub use gen::seeded;
