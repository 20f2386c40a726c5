//! Exact computer algebra for the Bernstein–Sato polynomial of the cyclic-pair
//! determinant `f(M, v) = det[v Mv … M^{n−1}v]`, together with the rational
//! Calogero–Moser radial and shift-operator machinery used to factor it.

pub mod arith;
pub mod bernstein;
pub mod cyclic;
pub mod error;
pub mod radial;
pub mod shift;
pub mod weyl;

pub use error::{Error, Result};
