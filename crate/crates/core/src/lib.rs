//! Normalizers of maximal tori for finite reflection groups, computed exactly.
//!
//! The crate moves between root systems, marked reflection lattices and
//! marked reflection tori, builds the reflection, Tits and normalizer
//! extensions as explicit 2-cocycles, and classifies 2-adic marked
//! reflection lattices into Coxeter-type and DI(4) factors.

// Matrix code indexes several arrays with one loop variable.
#![allow(clippy::needless_range_loop)]

pub mod catalog;
pub mod cohomology;
pub mod coxeter;
pub mod document;
pub mod error;
pub mod extension;
pub mod lattice;
pub mod linsolve;
pub mod report;
pub mod rootdata;
pub mod selftest;
pub mod twoadic;
mod serde_big;

pub use error::{Error, Result};
