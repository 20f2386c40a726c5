use thiserror::Error;

/// Errors raised by the algebra engine.
///
/// Variants map onto the CLI exit-code contract: [`Error::is_usage`] errors are
/// resource/usage problems (exit 2), everything else is a mathematical mismatch
/// (exit 1).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("not divisible: nonzero remainder")]
    NotDivisible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("degree bound violated: interpolant of degree <= {bound} disagrees at k = {abscissa}")]
    DegreeBoundViolated { bound: usize, abscissa: String },
    #[error("need at least {needed} distinct abscissae, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("resource guard exceeded: {0}")]
    Guard(String),
    #[error("singular matrix")]
    Singular,
    #[error("bad base point: f vanishes there")]
    BadBasePoint,
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("identity violation: {0}")]
    IdentityViolation(String),
    #[error("factorization violation: {0}")]
    FactorizationViolation(String),
    #[error("unexpected pole along root {0}")]
    UnexpectedPole(String),
    #[error("ansatz bounds too small: {0}")]
    BoundsTooSmall(String),
    #[error("ambiguous minimal solution: nullspace dimension {0}")]
    Ambiguous(usize),
    #[error("grade undefined for the zero operator")]
    ZeroOperator,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by limits or malformed input rather than mathematics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::ArityMismatch(..)
                | Error::DimensionMismatch(..)
                | Error::Guard(..)
                | Error::Parse(..)
                | Error::TooFewPoints { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
