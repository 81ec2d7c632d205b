use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// An interval rule with `c1 >= c2` or non-finite endpoints.
    #[error("invalid interval rule [{c1}, {c2}]: lower multiplier must be strictly below the upper one")]
    InvalidRule { c1: f64, c2: f64 },

    /// A mixture whose weights or component count are not acceptable.
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    /// Candidate parameters that violate the constraints of their case.
    #[error("infeasible parameters for {case}: {msg}")]
    Infeasible { case: &'static str, msg: String },

    /// A series whose convergence condition does not hold.
    #[error("divergent series: {0}")]
    Divergence(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            func,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
