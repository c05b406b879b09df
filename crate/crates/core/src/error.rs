use std::fmt;

use thiserror::Error;

/// Pipeline stage a numerical failure originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    RateMatrix,
    InverseIMinusR,
    LevelS,
    BackwardBoundary,
    Normalize,
    LevelDependentTail,
    Truncation,
    Simulation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::RateMatrix => "rate-matrix",
            Stage::InverseIMinusR => "inverse-I-minus-R",
            Stage::LevelS => "level-s",
            Stage::BackwardBoundary => "backward-boundary",
            Stage::Normalize => "normalize",
            Stage::LevelDependentTail => "level-dependent-tail",
            Stage::Truncation => "truncation",
            Stage::Simulation => "simulation",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlowdownError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("model is not ergodic: rho_slow = {rho_slow} must be < 1")]
    Unstable { rho_slow: f64 },

    #[error("[{stage}] degenerate parameters: {detail}")]
    Degenerate { stage: Stage, detail: String },

    #[error("[{stage}] numerical failure: {detail}")]
    Numerical { stage: Stage, detail: String },

    #[error("[{stage}] no convergence: {detail}")]
    NoConvergence { stage: Stage, detail: String },

    #[error("state space too large: {states} states exceeds cap {cap}; use the matrix-analytic solver")]
    StateCap { states: usize, cap: usize },
}

impl SlowdownError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        SlowdownError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn numerical(stage: Stage, detail: impl Into<String>) -> Self {
        SlowdownError::Numerical {
            stage,
            detail: detail.into(),
        }
    }

    /// True for errors caused by user input rather than arithmetic.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            SlowdownError::InvalidParameter { .. } | SlowdownError::Unstable { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, SlowdownError>;
