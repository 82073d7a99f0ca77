//! Classification of SLOCC entanglement families of multipartite pure states
//! through the momentum map of the local unitary group.
//!
//! A state is flowed along the gradient of `−‖μ‖²` inside its SLOCC orbit to
//! the critical local-unitary orbit, where the family invariants are read off:
//! the polytope distance `d`, the maximal total variance, the Morse index and
//! the stability class.

pub mod canonical;
pub mod critical;
pub mod error;
pub mod flow;
pub mod linalg;
pub mod momentum;
pub mod morse;
pub mod statespace;

pub use error::{Error, Result};
pub use flow::{FlowConfig, FlowTrace};
pub use momentum::{MomentumPoint, SpectrumPoint};
pub use statespace::{PureState, Sector, SectorKind};
