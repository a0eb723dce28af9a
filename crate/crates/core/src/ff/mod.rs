//! Finite fields and dense linear algebra over them.

mod field;
mod matrix;

pub use field::{ExtField, Field, PrimeField};
pub use matrix::{EchelonSpace, FMatrix, Rref};
