//! Semi-involutory and MDS matrices over small finite fields.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`]: GF(2^m) and prime-field arithmetic on compact [`Elem`] values.
//! - [`matrix`]: dense square matrices, minors, MDS / involutory / reducibility tests.
//! - [`si`]: semi-involutory detection (exhaustive oracle and the 3×3 characterization).
//! - [`construct`]: the 8-parameter 3×3 construction and the Curupira-style involution.
//! - [`census`]: closed-form counts and brute-force verifiers.
//! - [`wire`]: JSON input/output formats.

pub mod census;
pub mod construct;
mod error;
pub mod field;
pub mod mat3;
pub mod matrix;
pub mod si;
pub mod wire;

pub use error::{Error, ErrorKind, Result};
pub use field::{Elem, Field, FieldElement, FieldSpec};
pub use matrix::{DiagonalMatrix, Permutation, SquareMatrix};
