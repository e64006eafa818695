use std::path::PathBuf;

/// Failures mapped onto the documented exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("environment variable {name}: {message}")]
    Env { name: &'static str, message: String },

    #[error("invalid parameter: {0}")]
    Invalid(heatrobin_core::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("solver failed: {0}")]
    Solver(heatrobin_core::Error),

    #[error("{failed} verification check(s) failed")]
    Threshold { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Threshold { .. } => 1,
            CliError::Config { .. } | CliError::Env { .. } | CliError::Invalid(_) | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            context: context.into(),
            source,
        }
    }
}

/// Parameter errors are the caller's fault; everything else from the solver
/// is a solver failure.
pub(crate) fn from_solver(err: heatrobin_core::Error) -> CliError {
    match err {
        heatrobin_core::Error::InvalidParameter { .. } => CliError::Invalid(err),
        other => CliError::Solver(other),
    }
}
