use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch at layer {layer}: expected input of length {expected}, got {actual}")]
    LayerDimensionMismatch {
        layer: usize,
        expected: usize,
        actual: usize,
    },

    #[error("zero vector: the angle with a zero vector is undefined")]
    ZeroVector,

    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    Domain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("layer of {rows}x{cols} entries exceeds the element cap of {cap}")]
    SizeOverflow { rows: usize, cols: usize, cap: usize },

    #[error("every one of the {trials} trials produced a zero output vector")]
    AllTrialsDegenerate { trials: usize },

    #[error(
        "hypotheses too close to separate: gap {gap:.3e} < 5 x predicted stderr {predicted_stderr:.3e}; \
         about {required_trials} trials are needed at this width"
    )]
    HypothesesTooClose {
        gap: f64,
        predicted_stderr: f64,
        required_trials: u64,
    },

    #[error("at least two points are required, got {0}")]
    TooFewPoints(usize),

    #[error("infeasible class geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("malformed layer fixture: {0}")]
    Fixture(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
