use std::path::PathBuf;

use thiserror::Error;

/// Standing assumptions a configuration must satisfy for the convergence
/// guarantees to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// Piecewise-constant step size `γ0 / c1^n` with integer `c1 ≥ 2`, `c2 ≥ 1`
    /// and integer initial weight multiples.
    StepSizeRule,
    /// Every node spends at least one weight-balancing bit in every window.
    WeightBitWindow,
    /// All nodes quantize their estimates simultaneously at least once per window.
    ConsensusBitWindow,
    /// Positive, nonincreasing, square-summable but non-summable consensus gain.
    ConsensusGain,
    /// The initial average lies inside the quantizer range.
    InformativeAverage,
}

impl std::fmt::Display for Assumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Assumption::StepSizeRule => "step-size rule",
            Assumption::WeightBitWindow => "weight-balancing bit window",
            Assumption::ConsensusBitWindow => "consensus bit window",
            Assumption::ConsensusGain => "consensus gain sequence",
            Assumption::InformativeAverage => "informative initial average",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("violates the {assumption} assumption: {detail}")]
    Assumption {
        assumption: Assumption,
        detail: String,
    },

    /// An exact integer count left the representable range. The run is
    /// aborted because continuing would silently lose exactness.
    #[error("integer overflow in exact representation ({0})")]
    Overflow(&'static str),

    #[error("diagnostic unavailable: {0}")]
    DiagnosticUnavailable(&'static str),

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn assumption(assumption: Assumption, detail: impl Into<String>) -> Self {
        Error::Assumption {
            assumption,
            detail: detail.into(),
        }
    }

    /// Strips trial wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
