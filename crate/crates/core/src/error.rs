use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("integrand decaying like r^-{decay} is not integrable at infinity in dimension {dim}")]
    NonIntegrable { decay: f64, dim: usize },

    #[error("tolerance not reached after {evaluations} evaluations: value {value:e} +/- {abs_error:e}")]
    ToleranceNotReached { value: f64, abs_error: f64, evaluations: usize },

    #[error("monomial degree {0} exceeds the supported maximum of 4")]
    UnsupportedDegree(u32),

    #[error("curvature symmetry violated: max defect {defect:e} ({what})")]
    SymmetryViolation { what: &'static str, defect: f64 },

    #[error("dimension {dim} is below the minimum {min}")]
    DimensionTooLow { dim: usize, min: usize },

    #[error("concentration scales are not strictly decreasing")]
    NonMonotoneScales,

    #[error("{what} index {index} outside {lo}..={hi}")]
    IndexOutOfRange { what: &'static str, index: usize, lo: usize, hi: usize },

    #[error("series value at position {0} is not positive")]
    NonPositiveValue(usize),

    #[error("slope fit needs at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("|Weyl|^2 = {0:e} leaves the first-level energy without an interior maximum")]
    DegenerateWeyl(f64),

    #[error("finite-difference step {0:e} is too small for the requested evaluation")]
    StepTooSmall(f64),

    #[error("point lies outside the chart domain")]
    OutOfDomain,

    #[error("metric is not positive definite (smallest eigenvalue {0:e})")]
    SingularMetric(f64),

    #[error("map moves the fixed point by {0:e}")]
    FixedPointViolation(f64),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
