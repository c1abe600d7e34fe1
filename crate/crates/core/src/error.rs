use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite field")]
    NonFiniteField,

    #[error("invalid exponent: p = {0} (need p >= 1 or p = inf)")]
    InvalidExponent(f64),

    #[error("form not closed (residual {residual:e} > tol {tol:e})")]
    NotClosed { residual: f64, tol: f64 },

    #[error("time step too large: displacement {step:e} per substep exceeds {limit:e}")]
    TimeStepTooLarge { step: f64, limit: f64 },

    #[error("map not invertible at node {node} (residual {residual:e})")]
    NotInvertible { node: usize, residual: f64 },

    #[error("path not symplectic to tolerance at sample {sample} (residual {residual:e})")]
    NotSymplectic { sample: usize, residual: f64 },

    #[error("Hofer length undefined for non-Hamiltonian path (harmonic part {0:e})")]
    NotHamiltonian(f64),

    #[error("mismatched sampling: {0}")]
    Mismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trivial lattice has no nonzero element")]
    TrivialLattice,

    #[error("tolerance exceeds lattice packing radius")]
    ToleranceTooLarge,

    #[error("duality bounds undefined at zero flux")]
    ZeroFlux,

    #[error("bound vacuous for trivial quotient flux")]
    LatticeFlux,

    #[error("attachment must be a loop (integer class)")]
    NonIntegerAttachment,

    #[error("endpoint constraint not met (best endpoint error {best_error:e} after {evaluations} evaluations)")]
    EndpointNotMet { best_error: f64, evaluations: usize },

    #[error("degenerate region")]
    DegenerateRegion,

    #[error("region not displaceable by candidates")]
    NotDisplaceable,

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
