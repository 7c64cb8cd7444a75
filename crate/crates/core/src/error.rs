use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the physics and numerics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undeformed limit has unbounded momentum domain")]
    UnboundedDomain,

    #[error("momentum {p} lies outside the open interval (-{half_width}, {half_width})")]
    OutsideDomain { p: f64, half_width: f64 },

    #[error("grid built for beta = {grid} does not match model beta = {model}")]
    GridMismatch { grid: f64, model: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error(
        "quadrature did not converge with {nodes} nodes: successive estimates {previous} and {current}"
    )]
    QuadratureNonConvergence {
        nodes: usize,
        previous: Complex64,
        current: Complex64,
    },

    #[error("root is not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge after {iterations} iterations (last bracket [{lo}, {hi}])")]
    RootNonConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("single-valued branch absent for m = {m}: max of sqrt(eps)(1 - beta eps) is {max_lhs}, need {target}")]
    BranchAbsent { m: u32, max_lhs: f64, target: f64 },

    #[error("m(n) undefined: beta * eps_n = {0} >= 1")]
    SingleValuedOutOfRange(f64),

    #[error("classical orbit has a turning point at p = {0} (denominator vanishes)")]
    TurningPoint(f64),

    #[error("classically forbidden point: E + alpha/x = {0} <= 0")]
    ClassicallyForbidden(f64),

    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("output error: {0}")]
    Output(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl Error {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnboundedDomain => "unbounded_domain",
            Error::OutsideDomain { .. } => "outside_domain",
            Error::GridMismatch { .. } => "grid_mismatch",
            Error::GridTooCoarse(_) => "grid_too_coarse",
            Error::QuadratureNonConvergence { .. } => "quadrature_non_convergence",
            Error::InvalidBracket { .. } => "invalid_bracket",
            Error::RootNonConvergence { .. } => "root_non_convergence",
            Error::BranchAbsent { .. } => "branch_absent",
            Error::SingleValuedOutOfRange(_) => "single_valued_out_of_range",
            Error::TurningPoint(_) => "turning_point",
            Error::ClassicallyForbidden(_) => "classically_forbidden",
            Error::InvalidStep(_) => "invalid_step",
            Error::Output(_) => "output",
        }
    }

    /// True for failures of an iterative numerical method (as opposed to bad input).
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonConvergence { .. }
                | Error::RootNonConvergence { .. }
                | Error::InvalidBracket { .. }
                | Error::BranchAbsent { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
