use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller supplied an out-of-range or inconsistent argument.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The log-chromaticity of a frame is constant, so no invariant
    /// direction can be estimated (typically a grayscale image).
    #[error("degenerate chromaticity: {0}")]
    DegenerateChromaticity(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("malformed data in {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
