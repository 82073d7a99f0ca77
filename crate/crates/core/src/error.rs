use thiserror::Error;

use crate::flow::FlowTrace;

/// Errors produced by the classification library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state vector is zero (norm below {0:e})")]
    ZeroState(f64),

    #[error("sector mismatch: {0}")]
    SectorMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid sector: {0}")]
    InvalidSector(String),

    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("party {party} out of range for {parties} parties")]
    PartyOutOfRange { party: usize, parties: usize },

    #[error("operation requires a qubit sector (local dimension 2)")]
    NotQubitSector,

    #[error("spectrum is not in the positive Weyl chamber: {0}")]
    NotInWeylChamber(String),

    #[error("state is not critical (gradient norm {grad_norm:e} > {tol:e})")]
    NotCritical { grad_norm: f64, tol: f64 },

    #[error("gradient flow did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NotConverged { iterations: usize, grad_norm: f64, trace: Box<FlowTrace> },

    #[error("one-parameter limit diverged: {0}")]
    Divergent(String),

    #[error("matrix is not symmetric (‖M − Mᵗ‖ = {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not antisymmetric (‖M + Mᵗ‖ = {0:e})")]
    NotAntisymmetric(f64),

    #[error("iterative reduction failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("unknown four-qubit family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("malformed state document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
