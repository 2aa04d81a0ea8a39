//! Homogeneous polynomials over `ℂ` (floating or exact rational), their
//! Jacobians and minors, and the exact linear system whose corank bounds the
//! number of independent polynomials sharing a Jacobian rank.

mod index;
mod interp;
mod matrix;
mod polynomial;
mod scalar;
mod system;

pub use index::{binomial, monomial_count, monomials, MultiIndex};
pub use interp::{coordinate_polynomials, CoordinatePolynomials, InterpolationMethod, PolyMap};
pub use matrix::{generic_rank, jacobian, numerical_rank, poly_minor, PolyMatrix, DEFAULT_RANK_TOL};
pub use polynomial::{ExactPoly, FloatPoly, HomogeneousPolynomial};
pub use scalar::{exact_from_c64, exact_int, exact_ratio, Exact, Scalar};
pub use system::{
    assemble_oxis, corank, corank_report, corollary_check, family_rank, leading_minors, CoefficientSystem,
    CorankReport, CorollaryReport, LeadingMinors, SizeCaps,
};
