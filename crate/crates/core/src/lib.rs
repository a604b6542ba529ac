//! Exact reductions for model checking Markov chains viewed as distribution
//! transformers.
//!
//! Given a column-stochastic matrix `M`, an initial distribution `μ`, a list of
//! semialgebraic targets and a deterministic Muller automaton over the target
//! alphabet, [`reduce::reduce_full`] produces an equivalent instance over an
//! invertible linear dynamical system whose dimension is the number of nonzero
//! eigenvalues of `M` with modulus strictly below one. [`decide`] settles the
//! fragments that become trivial after the reduction, and [`embed`] goes the
//! other way, turning an arbitrary rational linear dynamical system into an
//! ergodic Markov chain with the same characteristic word.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod automata;
pub mod decide;
pub mod embed;
pub mod ratlin;
pub mod reduce;
pub mod semialg;
pub mod spectra;

pub use ratlin::{RatMatrix, RatPoly, Rational};
