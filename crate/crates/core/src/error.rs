use thiserror::Error;

use crate::functionals::ConstraintReport;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed state-specification text.
    /// `line` and `column` are 1-based; both are 0 for schema errors that carry no position.
    #[error("parse error{}: {message}", position(*line, *column))]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// A well-formed record that violates a parameter invariant.
    #[error("invalid state specification: {0}")]
    Validation(String),

    /// A scalar argument outside the domain of an operation.
    #[error("argument out of domain: {0}")]
    Domain(String),

    /// The density violates a precondition of the requested functional.
    #[error("invalid density: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature hit its depth or cell budget before meeting the tolerance.
    #[error("quadrature did not converge for {what}: best estimate {value} (error estimate {abs_error})")]
    NonConvergence {
        what: String,
        value: f64,
        abs_error: f64,
    },

    /// Constraint checking could not finish its estimates; carries what was computed.
    #[error("constraint check incomplete: {reason}")]
    ConstraintEstimate {
        reason: String,
        partial: Box<ConstraintReport>,
    },

    /// Tail or support metadata needed for truncation is absent.
    #[error("missing density metadata: {0}")]
    MissingMetadata(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

fn position(line: usize, column: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!(" at line {line}, column {column}")
    }
}
