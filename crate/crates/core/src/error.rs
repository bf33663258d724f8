use thiserror::Error;

/// Errors raised by the evaluation, alignment and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("need at least two cameras")]
    TooFewCameras,

    #[error("degenerate source")]
    DegenerateSource,

    #[error("degenerate spacing")]
    DegenerateSpacing,

    #[error("indeterminate mean")]
    IndeterminateMean,

    #[error("zero median absolute deviation")]
    ZeroMad,

    #[error("no usable camera pairs")]
    NoUsablePairs,

    #[error("rotations unavailable")]
    RotationsUnavailable,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for failures caused by the geometry of the data rather than by
    /// malformed input or missing channels.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::DegenerateSource
                | Error::DegenerateSpacing
                | Error::IndeterminateMean
                | Error::ZeroMad
                | Error::NoUsablePairs
                | Error::TooFewPoints { .. }
                | Error::TooFewCameras
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
