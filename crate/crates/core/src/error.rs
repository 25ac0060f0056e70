use thiserror::Error;

/// Errors produced by the simulation kernel.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched sizes, invalid parameters, inconsistent inputs.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integrator produced values it should not have.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Non-finite field values; expected for the unregularized system.
    #[error("blow-up at t = {t}")]
    BlowUp { t: f64 },

    /// The CFL step controller halved dt past its retry budget.
    #[error("CFL retries exhausted at t = {t} (dt = {dt})")]
    CflExhausted { t: f64, dt: f64 },

    /// A diagnostics sink attached to a run failed.
    #[error("observer error: {0}")]
    Observer(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
