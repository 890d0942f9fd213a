use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample count {0} must be a power of two and at least 8")]
    InvalidSampleCount(usize),

    #[error("radius {r} outside the admissible range {range}")]
    RadiusOutOfRange { r: f64, range: &'static str },

    #[error("exponent p = {0} must be finite and greater than 1")]
    InvalidExponent(f64),

    #[error("series is not real-valued (conjugate-symmetry defect {0:.3e})")]
    NotRealValued(f64),

    #[error("point ({re}, {im}) lies outside the admissible domain")]
    OutsideDomain { re: f64, im: f64 },

    #[error("iterative solver stopped after {iterations} sweeps at relative residual {residual:.3e}")]
    SolverDidNotConverge { iterations: usize, residual: f64 },

    #[error("interior of the grid domain is not edge-connected ({components} components)")]
    DisconnectedInterior { components: usize },

    #[error("grid domain has no interior nodes")]
    EmptyInterior,

    #[error("no single-valued harmonic conjugate: period {period:.6} exceeds tolerance {tolerance:.3e}")]
    ExistenceFailure { period: f64, tolerance: f64 },

    #[error("function vanishes identically; Riesz ratio undefined")]
    DegenerateZero,

    #[error("fields live on different domains")]
    DomainMismatch,

    #[error("invalid lattice loop: {0}")]
    InvalidLoop(String),

    #[error("mask file: {0}")]
    MaskFormat(String),

    #[error("map {0} is not a disk automorphism")]
    NotAutomorphism(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}
