use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] mwave::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            other => other.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        1
    }
}
