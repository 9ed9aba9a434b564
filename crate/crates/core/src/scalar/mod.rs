//! Exact coefficient arithmetic: Gaussian rationals, Laurent monomials in the
//! half-unit variables, and factored rational functions.

pub mod gauss;
pub mod monomial;
pub mod poly;
#[allow(clippy::module_inception)]
pub mod scalar;

pub use gauss::Gauss;
pub use monomial::{Monomial, Node, Spectral, Term, Var};
pub use poly::Poly;
pub use scalar::{Scalar, ScalarError};
