use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The rule document could not be read as a rule file.
    #[error("rule file, line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A rule, polyline or argument violates a structural invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A computation would materialize more work than the configured budget allows.
    #[error("budget exceeded: {what} needs {requested}, limit is {limit}")]
    Budget {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    /// A numeric routine left the representable range.
    #[error("numeric overflow: {0}")]
    Overflow(String),

    /// An estimator ran out of usable samples.
    #[error("insufficient samples: {0}")]
    Samples(String),

    #[error("theorem precondition not met: {0}")]
    NotApplicable(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
