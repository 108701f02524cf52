//! Twisted Bruhat orders on Weyl groups, totally nonnegative cell samplers in
//! `SL_n`, and combinatorial certificates (EL-labelings, thinness, homology)
//! for the resulting posets.

// `WeylElement` caches its reduced word in a `OnceLock`; hashing and equality
// use only the matrix, so it is a sound map key.
#![allow(clippy::mutable_key_type)]
// Elimination loops read more clearly with explicit row/column indices.
#![allow(clippy::needless_range_loop)]

pub mod cartan;
pub mod doubleflag;
pub mod error;
pub mod homology;
pub mod io;
pub mod poset;
pub mod rational;
pub mod sl;
pub mod suite;
pub mod twisted;
pub mod weyl;

pub use cartan::{CartanConfig, CartanMatrix};
pub use error::{Error, Result};
pub use rational::Rational;
pub use weyl::{Budget, WeylElement, WeylGroup, Word};
