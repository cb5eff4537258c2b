use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad command line or configuration; nothing was written.
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numerical(#[from] jtcqed::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
            CliError::Io { .. } => "io",
        }
    }
}
