//! Coherent absorption of coherent and squeezed coherent light on lossy beam
//! splitters.
//!
//! Three independent engines compute the same physics:
//!
//! * [`absorption`]: closed-form coherence and intensity absorption built on
//!   the analytic moments in [`states`];
//! * [`gaussian`]: mean/covariance propagation through the four-mode unitary
//!   dilation of the splitter ([`beamsplitter`]);
//! * [`fock`]: brute-force truncated Fock-space simulation.
//!
//! [`sweep`] and [`verify`] drive parameter sweeps and the cross-engine
//! verification suite used by the `cpa` binary.

pub mod absorption;
pub mod beamsplitter;
pub mod cli;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod states;
pub mod sweep;
pub mod verify;

pub use absorption::{analyze, AbsorptionReport};
pub use beamsplitter::{dilation, DilationUnitary, LossyBeamSplitter};
pub use error::{Error, Result};
pub use gaussian::{GaussianState, ModePartition};
pub use states::{ComplexAmplitude, SqueezeParam, SqueezedCoherentState};
