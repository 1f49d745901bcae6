use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("antenna count {tx_antennas} does not equal rf_chains * ttds * phase_shifters = {rf_chains} * {ttds} * {phase_shifters}")]
    DimensionMismatch {
        tx_antennas: usize,
        rf_chains: usize,
        ttds: usize,
        phase_shifters: usize,
    },
    #[error("subcarrier count must be odd, got {0}")]
    EvenSubcarrierCount(usize),
    #[error("{name} must be positive and finite, got {value}")]
    Domain { name: &'static str, value: f64 },
    #[error("expected {expected} user distances, got {got}")]
    DistanceCount { expected: usize, got: usize },
    #[error("{what} index {index} outside 1..={len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("cannot give {users} users a non-empty share of {subarrays} subarrays")]
    Infeasible { users: usize, subarrays: usize },
    #[error("effective channel is ill-conditioned (smallest/largest singular value {ratio:e})")]
    Singular { ratio: f64 },
    #[error("precoder has zero transmit power")]
    DegeneratePower,
    #[error("empirical CDF needs at least one sample")]
    EmptySamples,
}
