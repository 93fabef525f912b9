//! Exact homological algebra toolkit: integer and Laurent linear algebra,
//! chain complexes and spectral sequences, exact-triangle detection and
//! deduction, index arithmetic and reducible lattice enumeration.

pub mod abgroup;
pub mod chain;
pub mod cli;
pub mod energy;
pub mod error;
pub mod exactlin;
pub mod index;
pub mod json;
pub mod les;
pub mod lin;
pub mod moduli;
pub mod rational;

pub use error::{Error, Result};
