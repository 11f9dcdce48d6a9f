use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] tlisd::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                tlisd::Error::Parameter(_) => 2,
                tlisd::Error::Io { .. } | tlisd::Error::Image { .. } | tlisd::Error::Format { .. } => 3,
                tlisd::Error::DegenerateChromaticity(_) | tlisd::Error::Numerical(_) => 4,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}
