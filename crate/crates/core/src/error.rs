use thiserror::Error;

/// Errors raised by the simulator and its calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SqueezeError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported size: N = {n} exceeds the limit of {max}")]
    UnsupportedSize { n: usize, max: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("degenerate measurement outcome at h = {h}: p(h) = {density:e}")]
    DegenerateOutcome { h: f64, density: f64 },

    #[error("mean spin is degenerate (|<S>| = {norm:e}); use Fisher-information metrics instead")]
    MeanSpinDegenerate { norm: f64 },

    #[error("numerical integration failed: {0}")]
    Integration(String),

    #[error("optimizer bracket [{lo}, {hi}] does not contain a unimodal minimum")]
    OptimizerBracket { lo: f64, hi: f64 },

    #[error("uninformative readout: calibration slope {slope:e} is too small to invert")]
    UninformativeReadout { slope: f64 },

    #[error("invalid geometry: {0}")]
    Geometry(String),
}

impl SqueezeError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, SqueezeError>;
