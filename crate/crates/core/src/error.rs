use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which grid an out-of-mesh atom violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Space,
    Velocity,
}

impl std::fmt::Display for GridKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GridKind::Space => f.write_str("space"),
            GridKind::Velocity => f.write_str("velocity"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("negative weight {weight} at atom {index}")]
    NegativeWeight { index: usize, weight: f64 },

    #[error("non-finite value in {what} at atom {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("atom {index} at {coords:?} lies outside the {grid} mesh box [-{n}, {n}]^d")]
    AtomOutsideMesh { grid: GridKind, index: usize, coords: Vec<f64>, n: u32 },

    #[error("mesh exceeded during step {step} (t = {time}): {source}; try N >= {suggested_n}")]
    MeshExceeded {
        step: usize,
        time: f64,
        suggested_n: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },

    #[error("measure is empty")]
    EmptyMeasure,

    #[error("expected a probability measure, total mass is {mass}")]
    NotProbability { mass: f64 },

    #[error("operation requires d = 1, got d = {0}")]
    NotOneDimensional(usize),

    #[error("initial data are identical (flat distance {0:e})")]
    InitialDataIdentical(f64),

    #[error("time {time} is not a mesh time for N = {n}")]
    NonMeshTime { time: f64, n: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
