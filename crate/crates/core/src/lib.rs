//! Finite-dimensional quantum measurement theory.
//!
//! `waylab` builds measurement schemes out of dense complex matrices, extracts
//! the observable a scheme actually measures, audits the hypotheses and the
//! conclusion of the Wigner-Araki-Yanase theorem numerically, and implements
//! the relativisation map that turns observables of a system into invariant
//! observables of system plus reference.
//!
//! Modules, bottom-up:
//!
//! * [`qcore`]: matrices, states, tensor products, partial traces, spectral
//!   decompositions.
//! * [`obs`]: discrete POVMs, Born statistics, smearing, spread measures.
//! * [`scheme`]: measurement schemes and their audits.
//! * [`way`]: noise-operator bounds, theorem audits and spread sweeps.
//! * [`relfr`]: cyclic groups, covariant reference observables, the yen map.
//! * [`models`]: named model families, selectable at runtime.
//! * [`cli`]: the batch runner behind the `waylab` binary.

pub mod cli;
pub mod error;
pub mod models;
pub mod obs;
pub mod qcore;
pub mod relfr;
pub mod scheme;
pub mod tol;
pub mod way;

pub use error::{Result, WayError};
pub use num_complex::Complex64 as C64;
pub use tol::Tolerances;
