//! Beilinson monads over the exterior algebra and the rational surfaces of
//! degree 12 and sectional genus 13 in P^4 they produce.

pub mod error;
pub mod adjunction;
pub mod bott;
pub mod certificate;
pub mod emod;
pub mod extalg;
pub mod ff;
pub mod fixtures;
pub mod geometry;
pub mod monad;
pub mod poly;
pub mod search;

pub use error::{Error, Result};
