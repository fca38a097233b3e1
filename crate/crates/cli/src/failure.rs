//! Failures reported as one JSON object on stderr, with exit code 2 for
//! configuration problems and 3 for numerical ones.

use fpade_core::table::json_string;
use fpade_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Config,
    Numerical,
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub class: Class,
    pub reason: String,
    pub message: String,
}

impl Failure {
    pub fn config(reason: &str, message: impl Into<String>) -> Self {
        Failure {
            class: Class::Config,
            reason: reason.to_string(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class {
            Class::Config => 2,
            Class::Numerical => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let kind = match self.class {
            Class::Config => "ConfigError",
            Class::Numerical => "NumericalError",
        };
        format!(
            "{{\"error\":{},\"message\":{},\"reason\":{}}}",
            json_string(kind),
            json_string(&self.message),
            json_string(&self.reason)
        )
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (class, reason) = match &e {
            Error::Domain(_) => (Class::Config, "domain"),
            Error::Parse(_) => (Class::Config, "parse"),
            Error::BoundViolation { .. } => (Class::Config, "bound_violation"),
            Error::NotSeparated { .. } => (Class::Numerical, "not_separated"),
            Error::Overflow => (Class::Numerical, "overflow"),
            Error::GridTooCoarse { .. } => (Class::Numerical, "grid_too_coarse"),
            Error::ContourThroughZero { .. } => (Class::Numerical, "contour_through_zero"),
            Error::NonConvergent(_) => (Class::Numerical, "non_convergent"),
            Error::QuadratureNonConvergent { .. } => (Class::Numerical, "quadrature_non_convergent"),
            Error::AbsHypothesisViolated(_) => (Class::Numerical, "abs_hypothesis_violated"),
        };
        Failure {
            class,
            reason: reason.to_string(),
            message: e.to_string(),
        }
    }
}
