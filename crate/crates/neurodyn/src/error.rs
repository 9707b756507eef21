use crate::integrate::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("state has {got} entries, model expects {want}")]
    DimensionMismatch { want: usize, got: usize },

    #[error("non-finite value at state index {index}")]
    NonFiniteValue { index: usize },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown channel '{0}'")]
    UnknownChannel(String),

    #[error("coupling matrix is {rows}x{cols}, expected {cells}x{cells}")]
    TopologyMismatch {
        rows: usize,
        cols: usize,
        cells: usize,
    },

    #[error("coupling gain {0} is not finite")]
    InvalidGain(f64),

    /// State left the admissible region (non-finite or above the 1e9 bound).
    /// Carries everything recorded up to the last finite sample.
    #[error("state diverged at t = {time}")]
    Divergence { time: f64, partial: Box<Trajectory> },

    #[error("sweep diverged at amplitude {amplitude} (t = {time})")]
    SweepDiverged { amplitude: f64, time: f64 },

    #[error("no amplitude produced a periodic spike train")]
    AllNotPeriodic,

    #[error("all step sizes reproduce the reference exactly; order is undefined")]
    DegenerateZeroError,
}
