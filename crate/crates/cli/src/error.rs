use std::fmt;

/// Failure of a CLI command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid configuration, or a configuration the run refuses.
    Config(String),
    Core(ergodiclab_core::Error),
    /// `--check` thresholds that were not met.
    Checks(Vec<String>),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ergodiclab_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::NumericGuard { .. }) => 3,
            CliError::Core(
                E::InvalidArgument(_)
                | E::SpaceMismatch { .. }
                | E::DimensionMismatch { .. }
                | E::Precondition(_)
                | E::Parse(_),
            ) => 2,
            CliError::Core(_) | CliError::Io(_) => 1,
            CliError::Checks(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Core(ergodiclab_core::Error::NumericGuard { guard, detail }) => {
                write!(f, "numeric guard `{guard}` tripped: {detail}")
            }
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Checks(failed) => write!(f, "{} check(s) failed: {}", failed.len(), failed.join("; ")),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ergodiclab_core::Error> for CliError {
    fn from(e: ergodiclab_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
