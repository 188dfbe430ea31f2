use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("spin value {0} is not one of -1, 0, +1")]
    InvalidSpin(i32),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("neighbor configuration has {got} spins, expected {expected}")]
    NeighborCount { expected: usize, got: usize },

    #[error("boundary pair must differ at the distinguished neighbor (both are {0})")]
    IdenticalPair(i32),

    #[error("({x}, {y}) lies outside the uniqueness subregions A, B, C")]
    OutsideUniquenessRegion { x: f64, y: f64 },

    #[error("({x}, {y}) has degenerate ground pairs (region boundary)")]
    DegenerateGround { x: f64, y: f64 },

    #[error("enumeration too large: {what} needs {needed} states, limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: u128,
        limit: u128,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
