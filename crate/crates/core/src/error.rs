use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("point {re}+{im}i lies on a slit of the bipolar transform")]
    OutOfDomain { re: f64, im: f64 },
    #[error("point lies outside disk {disk} (|x - c|/r = {ratio})")]
    OutsideDisk { disk: usize, ratio: f64 },
    #[error("strip samples live on different line rules")]
    GridMismatch,
    #[error("Hardy norm squared is negative ({0}); inputs are not Hardy-class samples")]
    NegativeNorm(f64),
    #[error("quadrature unconverged: panel doubling changed an entry by {0:e}")]
    QuadratureUnconverged(f64),
    #[error("eigensolver failed: {0}")]
    EigenFailure(String),
    #[error("linear solve failed: residual {residual:e} exceeds {threshold:e}")]
    SolveFailure { residual: f64, threshold: f64 },
    #[error("no disk covers the point")]
    NoCoveringDisk,
    #[error("angle {0} outside the supported range (0, pi - 1e-9)")]
    ThetaOutOfRange(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal conditions reported alongside a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    AliasRisk { nodes: usize, bandwidth: usize },
    NearBoundary { disk: usize, gap: f64 },
    NearBoundaryZ0 { im: f64 },
    StagnationAtMachineEps { iteration: usize },
}
