use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EriError {
    #[error("angular momentum {0} outside supported range 0..=3")]
    AngularMomentum(usize),

    #[error("invalid quartet class string {0:?}")]
    ClassSyntax(String),

    #[error("exponent must be positive and finite, got {0}")]
    Exponent(f64),

    #[error("center coordinate is not finite")]
    Center,

    #[error("Boys argument must be non-negative and finite, got {0}")]
    BoysArgument(f64),

    #[error("Boys order {0} exceeds supported maximum {max}", max = crate::boys::MAX_BOYS_ORDER)]
    BoysOrder(usize),

    #[error("Rys order {0} outside supported range 1..=7")]
    RysOrder(usize),

    #[error("Rys root computation did not converge (order {order}, T = {t})")]
    RysConvergence { order: usize, t: f64 },

    #[error("node set has order {found}, class needs {expected}")]
    NodeOrder { expected: usize, found: usize },

    #[error("bit width {0} outside supported range 2..=32")]
    BitWidth(u32),

    #[error("non-finite ERI value at index {0}")]
    NonFinite(usize),

    #[error("expected {expected} chunks for {count} codes at {bits} bits, found {found}")]
    ChunkCount {
        expected: usize,
        found: usize,
        count: usize,
        bits: u32,
    },

    #[error("all four shells must be s-type")]
    NotAllS,

    #[error("malformed record: {0}")]
    Record(String),

    #[error("malformed stream: {0}")]
    Stream(String),

    #[error("lattice dimensions must be positive and spacing > 0")]
    Lattice,

    #[error("cannot start worker threads: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, EriError>;
