//! Exact computations in the plane Cremona group.
//!
//! This crate implements, with exact arithmetic throughout:
//!
//! - composition, normalization, and degree bookkeeping for birational maps
//!   of the projective plane given as triples `[f0 : f1 : f2]` of coprime
//!   homogeneous polynomials ([`cremona`]);
//! - the monomial subgroup `GL_2(Z) ⋉ D_2` with exact torus arithmetic,
//!   conjugation normal forms, and trace-wise conjugacy classes
//!   ([`monomial`]);
//! - fans in `Z^2`, toric blow-ups, and the contraction combinatorics of
//!   monomial maps ([`toric`]);
//! - degree sequences, growth classification, dynamical degrees, the Lehmer
//!   gap check, and finite-rank Picard–Manin isometries ([`dynamics`]);
//! - reduction of finitely generated subgroups modulo a well-chosen prime,
//!   with verified homomorphism certificates ([`modp`]).
//!
//! The arithmetic substrate (rationals, prime fields, homogeneous
//! polynomials, gcds, univariate rational functions) lives in [`exact`].

pub mod cremona;
pub mod dynamics;
pub mod exact;
pub mod modp;
pub mod monomial;
pub mod toric;
