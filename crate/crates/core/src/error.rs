use crate::ComplexPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("zeta has a pole at s = 1 (requested s = {s})")]
    PoleAt1 { s: ComplexPoint },

    #[error("error bound {achieved:e} at s = {s} exceeds the target {target:e}")]
    AccuracyUnreachable {
        s: ComplexPoint,
        achieved: f64,
        target: f64,
    },

    #[error("argument outside the supported domain: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no sign change of zeta' on ({lo}, {hi})")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("profile covers [{have_lo}, {have_hi}] but [{want_lo}, {want_hi}] was requested")]
    Coverage {
        have_lo: f64,
        have_hi: f64,
        want_lo: f64,
        want_hi: f64,
    },

    #[error("degenerate curve: {0}")]
    DegenerateCurve(String),

    #[error("curvature must be strictly positive, found {kappa} at t = {t}")]
    Positivity { t: f64, kappa: f64 },

    #[error("the function vanishes on the integration segment near t = {t}")]
    ZeroOnSegment { t: f64 },

    #[error("a zero or pole lies within {distance:e} of the contour near {at}")]
    ContourTooClose { at: ComplexPoint, distance: f64 },

    #[error("quadrature did not converge on [{lo}, {hi}] (estimated error {error:e})")]
    Quadrature { lo: f64, hi: f64, error: f64 },

    #[error("sampling step {step:e} too coarse, at most {required:e} is needed")]
    SamplingTooCoarse { step: f64, required: f64 },
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::PoleAt1 { .. } => "pole_at_1",
            Error::AccuracyUnreachable { .. } => "accuracy_unreachable",
            Error::Domain(_) => "domain_error",
            Error::InvalidInput(_) => "invalid_input",
            Error::BracketFailure { .. } => "bracket_failure",
            Error::Coverage { .. } => "coverage_error",
            Error::DegenerateCurve(_) => "degenerate_curve",
            Error::Positivity { .. } => "positivity_error",
            Error::ZeroOnSegment { .. } => "zero_on_segment",
            Error::ContourTooClose { .. } => "contour_too_close",
            Error::Quadrature { .. } => "quadrature_failure",
            Error::SamplingTooCoarse { .. } => "sampling_too_coarse",
        }
    }

    /// True for errors caused by bad arguments rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Domain(_))
    }
}
