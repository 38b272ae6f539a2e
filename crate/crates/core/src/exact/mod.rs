//! Exact arithmetic substrate: arbitrary-precision rationals, prime fields,
//! homogeneous trivariate polynomials, gcd, Jacobians, and substitution.

pub mod field;
pub mod gcd;
pub mod parse;
pub mod poly;
pub mod uni;

pub use field::{rat, rint, Field, Fp, Rat};
pub use gcd::poly_gcd;
pub use parse::{parse_map, parse_poly};
pub use poly::{jacobian_det, HomPoly3, Var};
pub use uni::{RatFun, UniPoly};

/// Errors from the exact-arithmetic layer.
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ExactError {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: u32, right: u32 },
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("parse error: {0}")]
    Parse(String),
}
