use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid qubit index {0} (expected 1 or 2)")]
    InvalidQubit(u8),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing configuration key `{0}`")]
    MissingKey(String),

    #[error("singular point in closed-form spectrum at Δr = {delta_r} rad/ns")]
    SingularPoint { delta_r: f64 },

    #[error("Fock cutoff too small: top level occupation {occupation:e} exceeds 1e-6 (n_max = {n_max})")]
    Cutoff { occupation: f64, n_max: usize },

    #[error("steady state did not converge: {0}")]
    NonConvergence(String),

    #[error("cannot normalize an all-zero trace")]
    ZeroTrace,

    #[error("grid [{lo}, {hi}] does not cover pull at {shift} rad/ns")]
    Coverage { shift: f64, lo: f64, hi: f64 },

    #[error("merged peak mixes same-parity and different-parity logic states: {0}")]
    AmbiguousMerge(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
