// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Failures raised by the geometry pipelines.
///
/// Every variant maps to a stable class string (see [`Error::class`]) that the
/// command-line front end reports in its machine-readable error output.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degenerate norm: {0}")]
    DegenerateNorm(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("profile does not bound a centrally symmetric convex body: {0}")]
    NonConvexProfile(String),

    #[error("adaptive quadrature exceeded depth {depth} on [{a}, {b}]")]
    QuadratureFailure { a: f64, b: f64, depth: u32 },

    #[error("phase shift not found at s = {s} (residual {residual:e})")]
    PhaseNotFound { s: f64, residual: f64 },

    #[error("singular frame at s = {s} (det = {det:e})")]
    SingularFrame { s: f64, det: f64 },

    #[error("eps schedule too coarse at s = {s}: successive estimates {a} and {b}")]
    ScheduleTooCoarse { s: f64, a: f64, b: f64 },

    #[error("level {level:e} out of range of the second helper integral at s = {s}")]
    LevelOutOfRange { s: f64, level: f64 },

    #[error(
        "integral of the radial curvature over a half period is {0:e}; expected a positive value"
    )]
    DegenerateRho(f64),

    #[error("integration blew up at s = {s} (|r| = {magnitude})")]
    BlowUp { s: f64, magnitude: f64 },

    #[error(
        "curvature mismatch: max |drho| = {rho:e}, max |dtau| = {tau:e}, |dL| = {half_length:e}"
    )]
    CurvatureMismatch {
        rho: f64,
        tau: f64,
        half_length: f64,
    },

    #[error("the curvature profiles agree only under the orientation-reversing correspondence, which the image of e2 rules out")]
    ReflectionAmbiguity,

    #[error("sampling too coarse for eps = {eps}: consecutive chord {chord}")]
    ResolutionError { eps: f64, chord: f64 },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable class name.
    pub fn class(&self) -> &'static str {
        match self {
            Error::DegenerateNorm(_) => "DegenerateNorm",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidBasis(_) => "InvalidBasis",
            Error::NonConvexProfile(_) => "NonConvexProfile",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::PhaseNotFound { .. } => "PhaseNotFound",
            Error::SingularFrame { .. } => "SingularFrame",
            Error::ScheduleTooCoarse { .. } => "ScheduleTooCoarse",
            Error::LevelOutOfRange { .. } => "LevelOutOfRange",
            Error::DegenerateRho(_) => "DegenerateRho",
            Error::BlowUp { .. } => "BlowUp",
            Error::CurvatureMismatch { .. } => "CurvatureMismatch",
            Error::ReflectionAmbiguity => "ReflectionAmbiguity",
            Error::ResolutionError { .. } => "ResolutionError",
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
