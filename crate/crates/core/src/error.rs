use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("mode m={order} is not guided at width {width_um:.4} µm")]
    NotGuided { order: usize, width_um: f64 },

    #[error("numerical failure: {what} (residual {residual:e})")]
    Numeric { what: String, residual: f64 },

    #[error("no phase match in bracket [{lo_um:.4}, {hi_um:.4}] µm")]
    NoPhaseMatch { lo_um: f64, hi_um: f64 },

    #[error("no crossing in voltage range [{lo}, {hi}] V")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("ambiguous pairing: mode {mode} is phase-matched to {partners:?}")]
    AmbiguousPairing { mode: usize, partners: Vec<usize> },

    #[error("design error: {0}")]
    Design(String),

    #[error("infeasible phase plan: {0}")]
    Infeasible(String),

    #[error("dimension mismatch: operator is {op}x{op}, state has {state} amplitudes")]
    Dimension { op: usize, state: usize },

    #[error("operator is not unitary (residual {0:e})")]
    NotUnitary(f64),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
