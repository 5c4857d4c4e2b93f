#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("integration halted: {0}")]
    Halt(String),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
    #[error("verification failed: {}", .0.join(", "))]
    VerifyFailed(Vec<String>),
}

impl CliError {
    /// 2 for configuration and output problems, 3 when an integrator
    /// stops, 1 when `verify` finds a failing invariant.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Halt(_) => 3,
            CliError::VerifyFailed(_) => 1,
        }
    }

    pub fn halt(e: bandflow_core::Error) -> Self {
        CliError::Halt(e.to_string())
    }
}
