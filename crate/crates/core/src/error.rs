use thiserror::Error;

/// Errors surfaced by the library. Validation failures carry enough context
/// to point at the offending data.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("lattices are not nested: column {column} is not in the span of the ambient lattice")]
    NonNestedLattice { column: usize },

    #[error("category mismatch: {0}")]
    CategoryMismatch(String),

    #[error("operation not supported for the Set instance")]
    SetVariant,

    #[error("negative epsilon")]
    NegativeEpsilon,

    #[error("points are not comparable: {0}")]
    NotComparable(String),

    #[error("invalid diagram point: {0}")]
    InvalidDgmPoint(String),

    #[error("functoriality violation at square {point:?} (axes {axis_a}, {axis_b})")]
    Functoriality {
        point: Vec<usize>,
        axis_a: usize,
        axis_b: usize,
    },

    #[error("invalid module data: {0}")]
    InvalidModule(String),

    #[error("inconsistent rank function: no finitely supported inversion on the critical grid ({0})")]
    InconsistentRankFunction(String),

    #[error("negative interval multiplicity {multiplicity} for [{birth}, {death}): invalid module data")]
    NegativeMultiplicity {
        birth: String,
        death: String,
        multiplicity: i64,
    },

    #[error("size cap exceeded: {got} > {cap}")]
    SizeCap { got: usize, cap: usize },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
