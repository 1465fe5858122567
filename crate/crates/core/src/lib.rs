//! Bivariate Jacobi–Piñeiro multiple orthogonal polynomials on the triangle
//! `T = {x, y ≥ 0, x + y ≤ 1}` and the Hermite–Padé approximants built from
//! them.
//!
//! * [`rodrigues`] builds the polynomials by composing Rodrigues operators
//!   (and, for two measures, by a closed-form coefficient formula).
//! * [`moments`] checks their multiple orthogonality exactly through
//!   closed-form moments of the Jacobi weights.
//! * [`hermite_pade`] evaluates the numerators `Φ^(j)` and the approximants
//!   `R_j = Φ^(j) / P` of the Stieltjes transforms `E_j`.
//! * [`quadrature`] holds independent Gauss–Jacobi oracles used to validate
//!   the closed forms.

pub mod cli;
pub mod error;
pub mod scalar;
pub mod simplex_poly;
pub mod specfun;
pub mod rodrigues;
pub mod hermite_pade;
pub mod moments;
pub mod quadrature;

pub use error::{Error, Result};
pub use rodrigues::{IndexPair, ParamSet};
pub use scalar::{Rational, Scalar};
pub use simplex_poly::{BaryPoly, MonoPoly};
