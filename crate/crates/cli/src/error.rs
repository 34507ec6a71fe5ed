use std::path::PathBuf;

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Core {
        stage: &'static str,
        #[source]
        source: cqs_core::Error,
    },
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn core(stage: &'static str) -> impl FnOnce(cqs_core::Error) -> CliError {
        move |source| CliError::Core { stage, source }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    /// Numerical failures (branch selection, conditioning, residuals) exit
    /// with 3; everything else traces back to the scenario or its
    /// environment and exits with 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core { source, .. } if source.is_numerical() => exit::NUMERICAL,
            _ => exit::CONFIG,
        }
    }
}
