//! Symbolic engine for the Lax hierarchy of the noncommutative
//! nonlinear Schrödinger system and its integrable boundaries.

pub mod coeff;
pub mod error;
pub mod ncpoly;
pub mod json;
pub mod latex;
pub mod parse;
pub mod boundary;
pub mod hierarchy;
pub mod oracle;
pub mod riccati;

pub use coeff::Coeff;
pub use error::{AlgebraError, ParseError};
