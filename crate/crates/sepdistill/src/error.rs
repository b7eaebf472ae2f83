use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("dimension {requested} exceeds the configured cap {max}")]
    DimOverflow { requested: usize, max: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("matrix is not Hermitian: max |A - A^dag| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("{kernel} did not converge within {sweeps} sweeps")]
    NoConvergence { kernel: &'static str, sweeps: usize },

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("state is not normalized: |norm - 1| = {0:.3e}")]
    NotNormalized(f64),

    #[error("states are not orthogonal: |<a|b>| = {0:.3e}")]
    NotOrthogonal(f64),

    #[error("mixing weight must lie strictly between 0 and 1, got {0}")]
    WeightOutOfRange(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error(
        "round {round} instrument on party {party} is not complete: \
         max |sum K^dag K - I| = {deviation:.3e}"
    )]
    IncompleteRound {
        round: usize,
        party: usize,
        deviation: f64,
    },

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
