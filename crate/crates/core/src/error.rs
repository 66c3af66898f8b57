use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParams { key: &'static str, reason: String },
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),
    #[error("unsupported derivative/series order {0}")]
    UnsupportedOrder(usize),
    #[error("degenerate detuning: {0}")]
    DegenerateDetuning(String),
    #[error("step size {dt_ns} ns exceeds stability bound {max_ns} ns")]
    StepSize { dt_ns: f64, max_ns: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("accuracy check failed: {0}")]
    Accuracy(String),
    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),
    #[error("coherence tracking lost at omega_c = {omega_mhz} MHz (overlap {overlap:.3})")]
    TrackingLost { omega_mhz: f64, overlap: f64 },
    #[error("sampling error: {0}")]
    Sampling(String),
    #[error("input density matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("Fock truncation too small: {0}")]
    Truncation(String),
    #[error("time grid mismatch: {0}")]
    GridMismatch(String),
    #[error("empty sweep")]
    EmptySweep,
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
