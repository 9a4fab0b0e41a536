use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KrError {
    #[error("Clifford algebra with zero generators is not supported")]
    DegenerateAlgebra,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("at most 2 extra negative generators are supported, got {0}")]
    TooManyExtraGenerators(usize),

    #[error("no Pauli-string real structure realizes Cliff({a},{b})")]
    NoRealStructure { a: usize, b: usize },

    #[error("vector has vanishing norm {norm:e}")]
    ZeroVector { norm: f64 },

    #[error("gap closed at m = {m} (closing set {{-{k}, -{k}+2, ..., {k}}})")]
    GapClosed { m: f64, k: usize },

    #[error("m = {m} lies outside the open range (-{d}, {d})")]
    OutOfRange { m: f64, d: usize },

    #[error("invalid axes {axes:?} for torus dimension {d}")]
    InvalidAxes { axes: Vec<usize>, d: usize },

    #[error("invalid model: {0}")]
    InvalidSpec(String),

    #[error("angle {angle} at position {index} outside [0, 2pi)")]
    AngleOutOfRange { index: usize, angle: f64 },

    #[error("grid size {0} must be even and at least 2")]
    InvalidGrid(usize),

    #[error("degree integral inconclusive: raw {raw} (residual {residual:.3}) on grid {grid_n}")]
    Inconclusive { raw: f64, residual: f64, grid_n: usize },

    #[error("matrix is not real (residual {0:e})")]
    NotReal(f64),

    #[error("matrix is not odd (residual {0:e})")]
    NotOdd(f64),

    #[error("matrix is not a selfadjoint unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("block extraction failed: {0}")]
    BlockExtractionFailed(String),
}

pub type Result<T> = std::result::Result<T, KrError>;
