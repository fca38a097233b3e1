use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Taylor coefficient of an entire function left the band `[1, Γ]`.
    #[error("|F_{index}| = {modulus} of `{label}` is outside [1, {gamma}]")]
    BoundViolation {
        label: String,
        index: usize,
        modulus: f64,
        gamma: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    /// Two frequencies are closer than the conditioning guard allows.
    #[error("frequencies not separated: min distance {separation:e} < required {required:e}")]
    NotSeparated { separation: f64, required: f64 },
    #[error("integer result exceeds 2^63")]
    Overflow,
    #[error("grid too coarse: search result has separation {separation:e}")]
    GridTooCoarse { separation: f64 },
    #[error("contour of radius {radius} passes through (or near) a zero")]
    ContourThroughZero { radius: f64 },
    #[error("did not converge: {0}")]
    NonConvergent(String),
    #[error("quadrature did not converge: doubling changed result by {change:e} (tol {tol:e})")]
    QuadratureNonConvergent { change: f64, tol: f64 },
    #[error("density violates the absolute-summability hypothesis: {0}")]
    AbsHypothesisViolated(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
