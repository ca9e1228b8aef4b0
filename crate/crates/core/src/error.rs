use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty pattern: no points")]
    EmptyPattern,
    #[error("window has non-positive area: [{x_min}, {x_max}] x [{y_min}, {y_max}]")]
    DegenerateWindow {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
    #[error("point {index} ({x}, {y}) lies outside the window")]
    PointOutsideWindow { index: usize, x: f64, y: f64 },
    #[error("point {index} has a non-finite {field}")]
    NonFinite { index: usize, field: &'static str },
    #[error("unknown type id {0}")]
    UnknownType(usize),
    #[error("type {0:?} has no points")]
    EmptyType(String),
    #[error("pattern must be rescaled to the unit square and mark-demeaned before the DFT ({missing})")]
    NotPreprocessed { missing: &'static str },
    #[error("min_n must be at least 1")]
    InvalidMinCount,
    #[error("every type has fewer than {min_n} points; nothing survives the filter")]
    AllTypesDropped { min_n: usize },
    #[error("partialization needs at least 2 types, found {0}")]
    TooFewTypes(usize),
    #[error("invalid smoother: {0}")]
    InvalidSmoother(String),
    #[error("matrix dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not Hermitian within tolerance (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is singular or ill-conditioned after ridge retry")]
    Singular,
    #[error("non-positive diagonal entry in inverse spectral matrix")]
    NonPositiveDiagonal,
    #[error("zero auto-spectrum at type {0}")]
    ZeroAutoSpectrum(usize),
    #[error("all {flagged} usable frequencies were flagged (singular: {singular}, non-positive diagonal: {non_positive})")]
    AllFrequenciesFlagged {
        flagged: usize,
        singular: usize,
        non_positive: usize,
    },
    #[error("threshold {0} must lie in (0, 1)")]
    InvalidThreshold(f64),
    #[error("edge ({0}, {1}) disagrees with the statistics at this threshold")]
    InconsistentEdge(usize, usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("invalid separator query: {0}")]
    InvalidSeparatorQuery(&'static str),
    #[error("invalid simulation spec: {0}")]
    InvalidSimulation(String),
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(&'static str),
}

/// Non-fatal conditions surfaced in reports.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    DuplicateCoordinates { count: usize },
    ZeroDiagonalRidge,
    TwoTypesOnly,
    BandwidthBelowAdmissible { bandwidth: usize, minimum: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DuplicateCoordinates { count } => {
                write!(f, "{count} points share coordinates with an earlier point")
            }
            Warning::ZeroDiagonalRidge => {
                f.write_str("ridge skipped: matrix diagonal is all zero")
            }
            Warning::TwoTypesOnly => f.write_str(
                "only 2 types: partial coherence reduces to ordinary coherence (empty conditioning set)",
            ),
            Warning::BandwidthBelowAdmissible { bandwidth, minimum } => write!(
                f,
                "bandwidth {bandwidth} is below the minimal admissible {minimum} and no ridge is set; smoothed matrices may be singular"
            ),
        }
    }
}
