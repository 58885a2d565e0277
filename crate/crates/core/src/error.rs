use thiserror::Error;

/// Errors raised by the library.
///
/// The variants are grouped the way the command line maps them onto exit
/// codes: input problems, resource guards, and broken internal invariants.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("infeasible type: {0}")]
    InfeasibleType(String),

    #[error("information density undefined: {0}")]
    UndefinedDensity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("guard exceeded: {0}")]
    Guard(String),

    #[error("did not converge: {0}")]
    NotConverged(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors caused by malformed or inconsistent input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_) | Error::Dimension(_) | Error::InfeasibleType(_)
        )
    }

    /// True for errors raised by a size or feasibility guard.
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::Guard(_) | Error::Config(_) | Error::NotConverged(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
