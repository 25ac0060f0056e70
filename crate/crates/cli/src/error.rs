use thiserror::Error;

/// Process exit codes of the `ovlab` binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok = 0,
    AuditFailed = 1,
    Config = 2,
    Integrator = 3,
    BlowUp = 4,
    Io = 5,
    Checksum = 6,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("integrator failure: {0}")]
    Integrator(String),

    /// Simulation halted by blow-up; outputs up to the halt are preserved.
    #[error("blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("I/O error: {0}")]
    Io(String),

    #[error("checksum mismatch: {0}")]
    Checksum(String),

    #[error("audit failed: {0}")]
    AuditFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::Config,
            CliError::Integrator(_) => ExitCode::Integrator,
            CliError::BlowUp { .. } => ExitCode::BlowUp,
            CliError::Io(_) => ExitCode::Io,
            CliError::Checksum(_) => ExitCode::Checksum,
            CliError::AuditFailed(_) => ExitCode::AuditFailed,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ovlab_core::Error> for CliError {
    fn from(e: ovlab_core::Error) -> Self {
        use ovlab_core::Error as E;
        match e {
            E::Config(m) | E::Domain(m) => CliError::Config(m),
            E::Numerical(m) => CliError::Integrator(m),
            E::Observer(m) => CliError::Io(m),
            E::BlowUp { t } => CliError::BlowUp {
                t,
                reason: "non-finite field values".into(),
            },
            E::CflExhausted { t, dt } => CliError::BlowUp {
                t,
                reason: format!("CFL retries exhausted (dt = {dt:e})"),
            },
        }
    }
}
