use thiserror::Error;

use crate::ncpoly::{FieldAtom, Mode, Shape};

/// Failures of the symbolic kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("shape mismatch: cannot multiply {left} by {right}")]
    ShapeMismatch { left: Shape, right: Shape },
    #[error("shape mismatch: cannot add {left} and {right}")]
    AddShapeMismatch { left: Shape, right: Shape },
    #[error("mode mismatch: {left:?} vs {right:?}")]
    ModeMismatch { left: Mode, right: Mode },
    #[error("atom `{atom}` is not available in {mode:?} mode")]
    AtomUnavailable { atom: FieldAtom, mode: Mode },
    #[error("word does not chain: {0}")]
    BrokenChain(String),
    #[error("constant of shape {0} is not square")]
    NonSquareConstant(Shape),
    #[error("series is truncated below lambda^{floor}; lambda^{requested} was requested")]
    Truncated { requested: i32, floor: i32 },
    #[error("leading coefficient is not an invertible constant: {0}")]
    NotInvertible(String),
    #[error("vanishing leading coefficient")]
    VanishingLeading,
    #[error("substitution did not reach a fixed point within {0} passes (rule set is not confluent)")]
    NonTerminating(usize),
    #[error("rule for `{pattern}` has replacement of shape {found}, expected {expected}")]
    RuleShape { pattern: String, expected: Shape, found: Shape },
    #[error("matrix-mode expression must be wrapped in a trace")]
    NeedsTrace,
    #[error("products of two trace polynomials are not representable")]
    TraceProduct,
    #[error("block layout mismatch: {0}")]
    Layout(String),
    #[error("linear ansatz failed: {0}")]
    Ansatz(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("unsupported (not linear in a leading derivative): {0}")]
    Unsupported(String),
    #[error("not conserved: {0}")]
    NotConserved(String),
}

/// Failures while reading expressions, coefficients or JSON documents.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed coefficient `{0}`")]
    Coefficient(String),
    #[error("unexpected character `{ch}` at offset {pos}")]
    UnexpectedChar { ch: char, pos: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token `{found}` at offset {pos}")]
    UnexpectedToken { found: String, pos: usize },
    #[error("division is only allowed by numbers or boundary constants")]
    BadDivision,
    #[error("{0}")]
    Algebra(#[from] AlgebraError),
    #[error("invalid document: {0}")]
    Document(String),
}
