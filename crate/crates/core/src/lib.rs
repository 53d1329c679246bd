//! Consensus of multi-agent systems that switch arbitrarily between a
//! continuous-time subsystem `ẋ = −L x` and a discrete-time subsystem
//! `x⁺ = (I − hL) x`.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: weighted graphs, Laplacians, structural predicates, spectra
//!   and the normalised left null vector `w`.
//! - [`bounds`]: admissible sampling-period bounds and Lyapunov decay
//!   certificates for the fixed/switching, undirected/directed and
//!   nonlinear regimes.
//! - [`dynamics`]: schedules, protocols, the CT/DT step kernels and the
//!   hybrid simulator.
//! - [`analysis`]: disagreement series, consensus verdicts, value
//!   prediction and decay-rate estimation.
//! - [`linalg`]: the dense eigenvalue solver and matrix exponential the
//!   rest of the crate is built on.

pub mod analysis;
pub mod bounds;
pub mod dynamics;
mod error;
pub mod fmt;
pub mod graph;
pub mod linalg;
pub mod random;
mod scc;

pub use analysis::{
    check_consensus, disagreement, estimate_decay_rate, fit_decay_rate, predict_consensus_value,
    ConsensusVerdict, DisagreementEntry, DisagreementSeries, Prediction, RateEstimate,
};
pub use bounds::{
    certify, decay_certificate, directed_bound, gershgorin_bound, nonlinear_bound,
    switching_bound, undirected_bound, CertificateReport, Regime, ValueRule,
};
pub use dynamics::{
    ct_flow, dt_step, nonlinear_ct_flow, nonlinear_input, simulate, validate_protocol_function,
    Coupling, Mode, ProbeRange, ProtocolKind, ProtocolSpec, Sample, Schedule, Segment,
    Topologies, Trajectory, ValidationReport,
};
pub use error::{Error, ErrorKind, Result};
pub use graph::{Graph, Laplacian, LeftEigenvector, Spectrum};
pub use random::{random_schedule, random_state, ScheduleParams};

pub use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;
