use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("d = {0} is not squarefree (or is < 2); expected a squarefree integer >= 2")]
    NotSquarefree(i64),
    #[error("no totally positive fundamental unit found for d = {d} within b <= {cap}")]
    UnitSearchExhausted { d: i64, cap: u64 },
    #[error("Chebyshev parameter a = {0} rejected; the length-one hypothesis needs a >= 3")]
    ChebyshevParam(String),
    #[error("index n = {0} rejected; t_n is defined for n >= 1")]
    TFracIndex(i64),
    #[error("(u, v) = (0, 0) does not generate a nonzero ideal")]
    ZeroIdeal,
    #[error("division by the zero element of the field")]
    ZeroDivisor,
    #[error("quadratic integer coordinates ({p}, {q}) violate integrality for d = {d}")]
    NotIntegral { p: String, q: String, d: i64 },
    #[error("order not found within cap {cap}; this signals a bug or pathological input")]
    OrderNotFound { cap: u64 },
    #[error("orbit not {g}-periodic under convention {convention}")]
    OrbitNotPeriodic { g: u64, convention: &'static str },
    #[error("argument outside the admissible domain: {0}")]
    Domain(String),
    #[error("degenerate argument: a dilogarithm factor vanishes exactly")]
    DegenerateArgument,
    #[error("route unavailable: {0}")]
    RouteUnavailable(String),
    #[error("need at least two samples to estimate a limit, got {0}")]
    TooFewSamples(usize),
    #[error("calibration inconclusive: {0}")]
    CalibrationInconclusive(String),
    #[error("feasibility cap exceeded: T_{n}(a) = {value} > {cap}")]
    FeasibilityExceeded { n: i64, value: String, cap: u64 },
    #[error("precision {0} below the 64-bit minimum")]
    PrecisionTooLow(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
