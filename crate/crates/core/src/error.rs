use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point:?} implies layer {layer}, outside window [{lo}, {hi}]")]
    OutOfWindow {
        point: Vec<f64>,
        layer: i64,
        lo: i64,
        hi: i64,
    },
    #[error("point {point:?} is not on the boundary of layer {layer}")]
    NotOnBoundary { point: Vec<f64>, layer: i64 },
    #[error("no layers instantiated")]
    EmptyWindow,
    #[error("expected a two-region partition, found {0} regions")]
    WrongArity(usize),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid medium: {0}")]
    InvalidMedium(String),
    #[error("non-positive medium mu = {mu} at {point:?}")]
    NonPositiveMedium { point: Vec<f64>, mu: f64 },
    #[error("perturbation profile is not differentiable (custom table)")]
    NotDifferentiable,
    #[error("delta = {delta} outside the admissible range ({lo}, {hi})")]
    DeltaOutOfRange { delta: f64, lo: f64, hi: f64 },
    #[error("bad resolution: wavelength {wavelength} < 8h = {limit}")]
    BadResolution { wavelength: f64, limit: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shell too thin: R - r = {width} < 4h = {limit}")]
    ShellTooThin { width: f64, limit: f64 },
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<num_complex::Complex64>,
    },
    #[error("singular system")]
    SingularSystem,
    #[error("degenerate matching system (possible real-axis resonance)")]
    DegenerateSystem,
    #[error("candidate does not solve the homogeneous equation: relative residual {residual:e} > {tol:e}")]
    NotHomogeneous { residual: f64, tol: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
