use mcloop::Error as CoreError;

/// CLI failure with its process exit code:
///
/// * 2 — configuration problems (parse errors, invalid parameters, bad grids)
/// * 3 — evaluation failures (poles, singular loops, non-finite responses)
/// * 4 — the cut-off search could not reach the target level
/// * 5 — the simulation blew up or never settled
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Core(CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidParam(_) | CoreError::ZeroFrequency | CoreError::Config(_) => 2,
                CoreError::DenominatorUnderflow { .. }
                | CoreError::SingularResolvent { .. }
                | CoreError::FeedbackSingular { .. }
                | CoreError::NonFiniteResponse { .. }
                | CoreError::PropertyViolation { .. } => 3,
                CoreError::NoCrossing { .. } | CoreError::SteadyGainUnbounded => 4,
                CoreError::Unstable { .. } | CoreError::NotSettled(_) => 5,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}
