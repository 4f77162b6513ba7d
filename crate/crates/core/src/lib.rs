//! Exact computations for rationally elliptic spaces.
//!
//! The crate works from two kinds of input: raw exponent data `(B; A)`
//! describing the degrees of rational homotopy generators, and model-space
//! expressions built from spheres and complex projective spaces. From these
//! it derives Poincaré polynomials, Euler characteristics, the arithmetic
//! conditions of Friedlander and Halperin, the ladder of upper bounds on
//! total Betti number, stabilization thresholds for powers `X^n`, and mixed
//! Hodge polynomials for products of projective spaces.
//!
//! All arithmetic is exact: coefficients are arbitrary-precision rationals
//! and sign decisions on rays are made with Sturm chains.

pub mod arithcond;
pub mod bounds;
pub mod census;
mod error;
pub mod exactpoly;
pub mod mixedhodge;
pub mod modelspace;
pub mod numfmt;
pub mod stabilize;

pub use error::{Error, Result};
pub use exactpoly::{RatPoly, SturmCertificate};
pub use modelspace::{ExponentData, InvariantReport, SpaceExpr, SpaceProfile};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
