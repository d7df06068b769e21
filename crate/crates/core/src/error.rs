use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// The divisor has zero standard part, so the quotient is not first-order.
    #[error("division by an infinitesimal leaves the first-order ring")]
    DivisionByInfinitesimal,
    /// Conditioning on evidence of prior probability zero.
    #[error("conditioning on evidence of zero probability")]
    ZeroEvidence,
    /// Only bounds are known and they do not decide the question.
    #[error("undetermined: {0}")]
    Undetermined(String),
    /// No prior mass on the all-black world can satisfy the requirement.
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid step curve: {0}")]
    InvalidCurve(String),
    #[error("x = {0} lies outside [0, 1]")]
    Domain(f64),
    #[error("every model posterior term underflowed")]
    AllZeroPosterior,
    #[error("invalid config field `{field}`: {message}")]
    Config { field: &'static str, message: String },
    #[error("cannot parse `{0}` as a hyperreal")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn config_err(field: &'static str, message: impl Into<String>) -> Error {
    Error::Config { field, message: message.into() }
}
