//! Discrete observables (POVMs), their statistics and spread measures.

pub mod dist;
pub mod outcome;
pub mod povm;

pub use dist::ProbDist;
pub use outcome::{centered_rep, Geometry, Outcome, OutcomeSet};
pub use povm::{
    born, compatible, observable_distance, smear_cyclic, spectral_pvm, validate_povm, DiscreteObservable,
    PovmReport, DEFAULT_MERGE_TOL,
};
