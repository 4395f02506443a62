//! Preferential attachment trees with location-based choice.
//!
//! Each new vertex samples `r` candidates with probability proportional to
//! `degree + alpha`, ranks them by their uniform location and attaches to the
//! candidate of rank `s` with probability `Xi_s`.
//!
//! * [`analytic`] evaluates the limit theory: the choice density `f`, the
//!   critical bias `alpha_c`, the location measure `Psi`, the local degree
//!   kernel and the power-law exponent `tau`.
//! * [`growth`] simulates the tree with an `O(r log V)` step.
//! * [`stats`] measures snapshots and compares them with the theory.

pub mod analytic;
pub mod bernstein;
pub mod choice;
pub mod constants;
pub mod error;
pub mod fenwick;
pub mod growth;
pub mod special;
pub mod stats;

pub use analytic::{
    AnalyticModel, CriticalPoint, DegreeBound, LowerKernelForm, Maximizers, MuKProfile, Phase,
    PsiSolution,
};
pub use choice::ChoiceVector;
pub use error::{Error, Result};
pub use growth::{GrowthState, InitialTree, ModelParams, StepOutcome};
pub use stats::{LocalDegreeGrid, PowerLawFit, SnapshotStats};
