use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{name} must be a non-negative integer, got {value}")]
    NegativeQuantumNumber { name: &'static str, value: i64 },

    #[error("Laguerre parameter alpha = {0} must exceed -1")]
    LaguerreAlpha(f64),

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("wavefunction and ladder operator disagree on {0}")]
    ParameterMismatch(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("branch (k1, k2) = ({k1}, {k2}) at p = {p} has non-positive denominator {denominator}")]
    DegenerateDenominator {
        p: u32,
        k1: i8,
        k2: i8,
        denominator: f64,
    },

    #[error("eigenvalue {index} did not converge: Richardson estimates {coarse} and {fine} differ")]
    NonConvergence {
        index: usize,
        coarse: f64,
        fine: f64,
    },

    #[error("unknown mutation target {0:?}")]
    UnknownMutation(String),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
