//! Simulation of a two-qubit composite system dephased by a spin environment:
//! branch-compressed global states, reduced density matrices, entropies,
//! mutual information, discord and discord-nullity certificates.

pub mod branchstate;
pub mod classicality;
pub mod density;
pub mod error;
pub mod infomeasures;
pub mod matcore;
pub mod oracle;
pub mod sweep;
pub mod verify;

pub use branchstate::{Branch, BranchLabel, BranchState, ModelParams, PureState, SubsystemSelector};
pub use classicality::{ClassicalityReport, PlateauReport};
pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use infomeasures::{DiscordResult, MeasurementBasis};
pub use matcore::{ComplexMatrix, C64};
pub use oracle::{DenseEvolver, DenseParams, DenseState};
pub use sweep::{Model, ModelState, Quantity};
pub use verify::{run_verify, SuiteResult, VerifyConfig, VerifySummary};
