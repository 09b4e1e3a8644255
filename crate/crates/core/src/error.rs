use thiserror::Error;

/// Errors raised by curve construction, transforms and the file readers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate curve")]
    DegenerateCurve,
    #[error("not an immersion at sample {index}")]
    NotImmersion { index: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("speed pole in domain")]
    SpeedPole,
    #[error("lift undefined at sample {index}")]
    LiftUndefined { index: usize },
    #[error("invalid tube state at sample {index}")]
    InvalidTubeState { index: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("track too short: {usable} usable fixes")]
    TrackTooShort { usable: usize },
}

impl Error {
    /// True for failures of the numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateCurve
                | Error::NotImmersion { .. }
                | Error::SpeedPole
                | Error::LiftUndefined { .. }
                | Error::InvalidTubeState { .. }
                | Error::TrackTooShort { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
