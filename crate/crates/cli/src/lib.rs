//! Library side of the `pdrazin` command: instance files, the four commands
//! and their rendering. Every command returns its output text together with
//! the process exit code, so the binary is a thin wrapper.

pub mod commands;
pub mod file;
pub mod format;

use pdrazin_core::{Error, Tolerances};

pub const ENV_TOL_ACC: &str = "PDRAZIN_TOL_ACC";

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Pass = 0,
    IdentityFailure = 1,
    Input = 2,
    Breakdown = 3,
    Hypothesis = 4,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn exit(&self) -> Exit {
        match self {
            CliError::Input(_) => Exit::Input,
            CliError::Core(e) => core_exit(e),
        }
    }
}

pub fn core_exit(e: &Error) -> Exit {
    match e {
        Error::Hypothesis { .. }
        | Error::NotGroupInvertible { .. }
        | Error::SeriesDivergence { .. } => Exit::Hypothesis,
        Error::Breakdown { .. } => Exit::Breakdown,
        Error::ContextMismatch
        | Error::InvalidContext(_)
        | Error::InvalidElement(_)
        | Error::InvalidSpec(_) => Exit::Input,
    }
}

/// Output of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub exit: Exit,
}

impl Outcome {
    pub fn new(text: String, exit: Exit) -> Self {
        Self { text, exit }
    }

    pub fn from_error(e: &CliError) -> Self {
        Self::new(format!("error: {e}\n"), e.exit())
    }
}

/// Default tolerances with `tol_acc` taken from `env_acc` when set.
/// Tolerances in an instance file take precedence over both.
pub fn base_tolerances(env_acc: Option<&str>) -> Result<Tolerances, CliError> {
    let mut t = Tolerances::default();
    if let Some(raw) = env_acc {
        let acc: f64 = raw
            .trim()
            .parse()
            .map_err(|_| CliError::Input(format!("{ENV_TOL_ACC}: cannot parse '{raw}'")))?;
        if !(acc.is_finite() && acc > 0.0) {
            return Err(CliError::Input(format!(
                "{ENV_TOL_ACC} must be positive, got {acc}"
            )));
        }
        t.acc = acc;
    }
    Ok(t)
}

/// [`base_tolerances`] reading the environment.
pub fn tolerances_from_env() -> Result<Tolerances, CliError> {
    base_tolerances(std::env::var(ENV_TOL_ACC).ok().as_deref())
}
