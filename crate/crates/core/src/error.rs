use std::path::PathBuf;

use crate::raster::Colorspace;

/// Error type shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("expected {expected:?} input, got {got:?}")]
    WrongColorspace {
        expected: Colorspace,
        got: Colorspace,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("too few corners: found {found}, need {need}")]
    TooFewCorners { found: usize, need: usize },

    #[error("too few matches: found {found}, need {need}")]
    TooFewMatches { found: usize, need: usize },

    #[error("too few inliers: found {found}, need {need}")]
    TooFewInliers { found: usize, need: usize },

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("optimization diverged: {0}")]
    Diverged(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Tag an error with the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
