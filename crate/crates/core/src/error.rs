//! Error types shared across the crate.

use thiserror::Error;

/// Errors from exact algebra operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial division leaves a remainder")]
    NotDivisible,
    #[error("substitution makes a denominator vanish identically")]
    DivisionByZeroIdentically,
    #[error("symbol `{0}` has no binding")]
    UnboundSymbol(String),
    #[error("denominator vanishes at the evaluation point")]
    DenominatorVanishesAtPoint,
    #[error("denominator is not a power of the boundary equation")]
    NonMonomialDenominator,
    #[error("pole order exceeds cap of {0}")]
    PoleOrderExceeded(u32),
}

/// Errors from vector-field and chart operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FieldError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("component count {found} does not match state arity {expected}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("component references undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("map is not invertible: inverse(forward({var})) = {got}, expected {var}")]
    NotInverse { var: String, got: String },
    #[error("weights ({0},{1},{2}) are incompatible: leading weight must divide the others")]
    IncompatibleWeights(u32, u32, u32),
    #[error("state dimension {0} is unsupported (only 2 and 3)")]
    UnsupportedDimension(usize),
    #[error("chart transform degenerates on the field's support")]
    DegenerateChart,
}

/// Errors from the singularity scanner.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SingularError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("system is not in boundary normal form: {0}")]
    NotNormalForm(String),
    #[error("point is not an accessible singularity of the chart")]
    NotAccessible,
    #[error("boundary equations involve symbolic parameters in their dominant part")]
    SymbolicObstruction,
}
