use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid dimension must be 1, 2, or 3, got {0}")]
    BadDimension(usize),

    #[error("grid needs at least 2 cells per axis, got {0}")]
    TooFewCells(usize),

    #[error("bounding box must be cubic with positive extent, got per-axis extents {0:?}")]
    NonCubicBbox(Vec<f64>),

    #[error("grid of {total} cells exceeds the memory budget of {budget} cells")]
    CapacityExceeded { total: usize, budget: usize },

    #[error("field values must be finite and non-negative, cell {index} holds {value}")]
    NegativeValue { index: usize, value: f64 },

    #[error("field must vanish on the outermost cell layer (compact support), cell {index} holds {value}")]
    NotCompactlySupported { index: usize, value: f64 },

    #[error("value buffer has {got} entries, grid has {want} cells")]
    LengthMismatch { got: usize, want: usize },

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("set contains cell index {index} outside a grid of {total} cells")]
    CellOutOfRange { index: usize, total: usize },

    #[error("delta must lie in [{min}, {max}] for this grid, got {delta}")]
    BadDelta { delta: f64, min: f64, max: f64 },

    #[error("set is empty")]
    EmptySet,

    #[error("instance of {cells} cells exceeds the exact-search cap of {cap}")]
    InstanceTooLarge { cells: usize, cap: usize },

    #[error("bracket inversion: lower {lower} exceeds upper {upper} (lower via {lower_method}, upper cover of {upper_balls} balls)")]
    BracketInversion {
        lower: f64,
        upper: f64,
        lower_method: String,
        upper_balls: usize,
    },

    #[error("ladder needs at least 2 levels, got {0}")]
    TooFewLevels(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field under-resolves the requested feature: {0}")]
    UnderResolved(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed field file: {0}")]
    MalformedField(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
