//! Exact scalar, univariate, multivariate and jet arithmetic.

pub mod coeff;
pub mod ideal_jet;
pub mod interp;
pub mod jet;
pub mod matrix;
pub mod multipoly;
pub mod ratfunc;
pub mod unipoly;

pub use coeff::{display_rational, format_rational, parse_rational, rat, ratio, Coeff};
pub use ideal_jet::{IdealJet, IdealSpace};
pub use interp::{interpolate, interpolate_rational};
pub use jet::{jet_of_poly, simplex_size, Jet, JetSpace};
pub use matrix::{modular_nullspace, ModEchelon, RatMatrix, SparseEchelon};
pub use multipoly::{Monomial, MultiPoly};
pub use num_rational::BigRational;
pub use ratfunc::RationalFunction;
pub use unipoly::{UniPoly, Var};
