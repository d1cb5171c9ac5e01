//! Genuine multipartite entanglement criteria for n-qubit Dicke states.
//!
//! The crate evaluates the Dicke-state criterion `I_m^n[rho]` on dense density
//! matrices or on structured state families, derives white-noise thresholds,
//! plans the Pauli measurements the criterion needs, and ships a randomized
//! harness that checks the biseparable bound.
//!
//! Qubit `1` is the most significant bit of every basis index and mask.

pub mod bisep;
pub mod cli;
pub mod criterion;
pub mod dicke;
pub mod error;
pub mod measurements;
pub mod thresholds;
pub mod tolerance;
pub mod witness;


pub use criterion::{evaluate_criterion, real_part_mode, CriterionReport, GammaPair, Verdict};
pub use dicke::{
    Bipartition, DensityOperator, ElementSource, ExcitationSet, PureState, StateFamily,
};
pub use error::{Error, Result};
pub use tolerance::Tolerances;
