//! Homogeneous polynomial ideals in at most five variables over a finite field.

mod groebner;
mod hilbert;
mod ideal;
mod mono;
mod polynomial;

pub use groebner::{groebner, GbOptions, Groebner};
pub use hilbert::{hilbert_function, hilbert_numerator, krull_dimension, minimalize, HilbertPolynomial};
pub use ideal::{random_invertible, Ideal, Smoothness};
pub(crate) use ideal::for_each_projective_point;
pub use mono::{count_monomials, monomials_of_degree, Mono, MAX_VARS};
pub use polynomial::Poly;
