use alloc::string::String;

/// Errors raised by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid fluid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("length mismatch: expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("derivative order {0} is not supported (expected 1, 2 or 3)")]
    InvalidOrder(u32),
    #[error("B_(n,m) needs at least one denominator argument")]
    NoDenominator,
    #[error("boundary decay check failed: max |u| = {max_boundary:e} over the outer 5% exceeds {threshold:e}")]
    DecayCheck { max_boundary: f64, threshold: f64 },
    #[error("operator 1 + a_mu A(f) is numerically singular (condition estimate {condition:e})")]
    DegenerateOperator { condition: f64 },
    #[error("wavenumber must be positive, got {0}")]
    InvalidWavenumber(f64),
    #[error("invalid step controls: {0}")]
    InvalidControls(String),
    #[error("time step underflow at t = {t}: dt = {dt:e}")]
    DtUnderflow { t: f64, dt: f64 },
    #[error("Rayleigh-Taylor condition violated at t = {t}: inf a_RT = {infimum:e}")]
    RtBreakdown { t: f64, infimum: f64 },
    #[error("point ({x}, {y}) lies inside the {band:e} guard band around the interface")]
    PointTooClose { x: f64, y: f64, band: f64 },
    #[error("integration path to ({x}, {y}) crosses the interface")]
    PathCrossesInterface { x: f64, y: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
