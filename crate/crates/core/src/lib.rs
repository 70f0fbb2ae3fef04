//! Entanglement generated by a lossless beam splitter fed with two
//! single-mode squeezed vacuum states.
//!
//! The crate has three layers:
//!
//! * [`gaussian`]: exact covariance-matrix engine (squeezers, beam splitter,
//!   reduction to one mode, symplectic eigenvalue, entropy, PPT test).
//! * [`fock`]: brute-force verifier working in a truncated photon-number
//!   basis, independent of the covariance formalism.
//! * [`optimize`]: parameter sweeps and entanglement maximization over the
//!   beam-splitter and squeezing phases.
//!
//! Batch workloads (sweeps, optimizer grids, oracle blocks) run on rayon when
//! the `parallel` feature is enabled (the default) and sequentially otherwise;
//! see [`Execution`].

pub mod error;
pub mod exec;
pub mod fock;
pub mod gaussian;
pub mod optimize;

pub use error::{Error, Result};
pub use exec::Execution;
pub use gaussian::{
    BeamSplitterParams, CovarianceMatrix2, GaussianState, PhaseSpacePoint, PptVerdict,
    SqueezingParam, ThermalEquivalent,
};
pub use optimize::{MaximizationResult, Param, ParameterSet, SweepRow, SweepSpec};
