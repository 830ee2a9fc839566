use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the positive half-line.
    #[error("domain error: {what} = {value} must be > 0")]
    Domain { what: &'static str, value: f64 },

    #[error("non-finite result evaluating {what} at x = {x} (order {order})")]
    NonFinite {
        what: String,
        x: f64,
        order: usize,
    },

    /// f^(n+1) vanishes or changes sign somewhere on the interval.
    #[error("mean undefined for this (f, m1, m2): {model} has vanishing derivative of order {order}{}", .p.map(|p| format!(" (p = {p})")).unwrap_or_default())]
    UndefinedMean {
        model: String,
        order: usize,
        p: Option<f64>,
    },

    /// An internal guarantee failed; indicates a bug upstream of the caller.
    #[error("internal contract violated: {0}")]
    Contract(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate denominator in {0}")]
    Degenerate(String),
}
