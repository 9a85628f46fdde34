use thiserror::Error;

/// Errors raised by the geometry, analytic and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported dimension d = {got}: {what} requires d = {need}")]
    UnsupportedDimension {
        what: &'static str,
        got: usize,
        need: usize,
    },
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("estimator refused: {0}")]
    Estimator(String),
    #[error("horizon too short: {fraction_unexited:.3} of paths did not exit before T = {horizon}; raise the horizon")]
    HorizonTooShort { fraction_unexited: f64, horizon: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
