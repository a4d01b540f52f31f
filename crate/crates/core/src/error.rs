use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input {0}")]
    NonFinite(f64),

    #[error("resolution exhausted: {what} (gap {gap:e} below {min:e})")]
    Resolution { what: String, gap: f64, min: f64 },

    #[error("mantissa of {0} bits is not supported (only 53-bit binary64 is implemented)")]
    UnsupportedPrecision(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("integer overflow computing convergent row n = {n}")]
    Overflow { n: usize },

    #[error("periodic orbit of period {period} detected (rotation number {p}/{period})")]
    Periodic { p: i64, period: u64 },

    #[error("return times inconsistent with a convergent recurrence at record {index}: {detail}")]
    Inconsistent { index: usize, detail: String },

    #[error("depth {requested} unachievable; maximum achieved depth {achieved}")]
    DepthUnachievable { requested: usize, achieved: usize },

    #[error("infeasible map parameters: {0}")]
    Infeasible(String),

    #[error("{0:.17} is not a break point")]
    NotABreak(f64),

    #[error("quadrature did not converge (achieved error {achieved:e})")]
    Quadrature { achieved: f64 },

    #[error("orbit combinatorics differ from the rotation: {0}")]
    Combinatorics(String),

    #[error("refinement structure mismatch at i = {i}, s = {s}: {detail}")]
    Refinement { i: i64, s: i64, detail: String },

    #[error("point {point:.17} lies outside the arc")]
    OutOfArc { point: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ambiguous evaluation at {x:.17}: {detail}")]
    Ambiguous { x: f64, detail: String },

    #[error("{0:.17} is not a jump point of F_n")]
    NotAJumpPoint(f64),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
