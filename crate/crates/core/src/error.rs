use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symbol `{0}` is not admissible (vanishes identically or does not vanish at 0)")]
    NonAdmissible(String),

    #[error("adaptive quadrature exceeded depth cap {depth} on [{a}, {b}]")]
    QuadratureFailure { depth: usize, a: f64, b: f64 },

    #[error("Daubechies lower bound {lower:e} is degenerate for a = {a}")]
    DegenerateSymbol { a: f64, lower: f64 },

    /// The series was cut while its tail was still significant. `value` holds
    /// the partial sum so callers may still use it.
    #[error("truncated series: tail fraction {tail_fraction:e} exceeds threshold (partial sum {value})")]
    TruncationWarning { value: f64, tail_fraction: f64 },

    #[error("synthesis grid of {resolution} points aliases bandlimit {bandlimit} (sup estimate {value})")]
    AliasWarning {
        value: f64,
        resolution: usize,
        bandlimit: usize,
    },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("vector is not unit length (norm {0})")]
    NotUnitVector(f64),

    #[error("pole-derivative triangle is singular at diagonal entry {0}")]
    SingularTriangle(usize),

    #[error("scale grid [{t_min}, {t_max}] too narrow: relative mass {outside:e} outside for eigenvalue {lambda}")]
    GridTooNarrow {
        t_min: f64,
        t_max: f64,
        lambda: f64,
        outside: f64,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("unsupported mode {0} for this manifold")]
    UnsupportedMode(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// The best-effort value carried by warning-class errors.
    pub fn partial_value(&self) -> Option<f64> {
        match self {
            Error::TruncationWarning { value, .. } | Error::AliasWarning { value, .. } => {
                Some(*value)
            }
            _ => None,
        }
    }
}
