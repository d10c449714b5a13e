use thiserror::Error;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the supported range {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },
    #[error("dual coupling is infinite: J = 0 has no dual")]
    DualUndefined,
    #[error("spin sum needs an integer number of states, got Q = {0}")]
    NonIntegerQ(String),
    #[error("{what} is limited to {max}, got {got}")]
    BoundExceeded {
        what: &'static str,
        max: usize,
        got: usize,
    },
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("loop configuration is not fully packed: {0}")]
    NotFullyPacked(String),
    #[error("weight sequence is not graded: {0}")]
    Ungraded(String),
    #[error("exact path needs rational values: {0}")]
    Irrational(String),
    #[error("{what} did not converge, final residual {residual:?}")]
    NonConvergence { what: &'static str, residual: Vec<f64> },
    #[error("root bracketing failed: {0}")]
    Bracket(String),
    #[error("cuts overlap or are misordered: {0}")]
    InvalidCuts(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(name: &'static str, value: impl ToString, range: &'static str) -> Error {
    Error::OutOfRange {
        name,
        value: value.to_string(),
        range,
    }
}
