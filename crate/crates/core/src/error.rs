use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit label must be non-empty")]
    EmptyLabel,

    #[error("duplicate qubit label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown qubit label `{0}`")]
    UnknownLabel(String),

    #[error("operator acts on {expected} qubit(s) but {got} target(s) were given")]
    ArityMismatch { expected: usize, got: usize },

    #[error("partial trace needs at least one qubit to keep")]
    EmptyKeep,

    #[error("register of {0} qubits exceeds the {max}-qubit cap", max = crate::quantum::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("need at least {needed} qubits, got {got}")]
    TooFewQubits { needed: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("reference state is not pure (purity {0})")]
    NotPure(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("channel is not trace-preserving (max deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("parameter `{name}` = {value} is out of range")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("clock regression: now = {now} precedes link creation at {created_at}")]
    ClockRegression { now: f64, created_at: f64 },

    #[error("replay attempt: entanglement link {0} was already consumed")]
    Replay(u64),

    #[error("entanglement link {0} is outside its coherence window")]
    Expired(u64),

    #[error("payload was erased in transit")]
    PayloadErased,

    #[error("entanglement distribution failed after {attempts} attempts")]
    DistributionFailed { attempts: u64 },

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by a bad experiment definition rather than a
    /// failure while running it.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Topology(_) | Error::OutOfRange { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
