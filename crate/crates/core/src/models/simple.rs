//! SWAP and Lüders schemes.

use crate::error::{Result, WayError};
use crate::obs::{DiscreteObservable, Geometry, Outcome, OutcomeSet};
use crate::qcore::{pauli, ComplexMatrix, StateVector};
use crate::scheme::{square_root_coupling, Coupling, MeasurementScheme, PointerPvm};
use crate::tol;

use super::lattice::momentum_vector;

/// Equally spaced values `1 − 2m/(d − 1)`, so `d = 2` gives `±1`.
pub fn spin_values(d: usize) -> Vec<f64> {
    if d == 1 {
        return vec![1.0];
    }
    (0..d).map(|m| 1.0 - 2.0 * m as f64 / (d - 1) as f64).collect()
}

/// PVM of the computational basis with values [`spin_values`]; `σ_z` for
/// `d = 2`.
pub fn clock_observable(d: usize) -> DiscreteObservable {
    let outcomes = OutcomeSet::from_values(&spin_values(d), Geometry::Linear).expect("distinct values");
    let effects = (0..d)
        .map(|m| {
            let mut p = ComplexMatrix::zeros(d, d);
            p[(m, m)] = 1.0.into();
            p
        })
        .collect();
    DiscreteObservable::new_unchecked(outcomes, effects).expect("square effects")
}

/// PVM of the Fourier basis with values [`spin_values`]; `σ_x` for `d = 2`.
pub fn fourier_observable(d: usize) -> DiscreteObservable {
    let outcomes = OutcomeSet::from_values(&spin_values(d), Geometry::Linear).expect("distinct values");
    let effects = (0..d)
        .map(|m| {
            let v = momentum_vector(d, m);
            ComplexMatrix::outer(&v, &v)
        })
        .collect();
    DiscreteObservable::new_unchecked(outcomes, effects).expect("square effects")
}

/// SWAP coupling on `C^d ⊗ C^d` with the given PVM as pointer and the
/// apparatus prepared in `e_0`.
pub fn make_swap(dim: usize, pointer: &DiscreteObservable) -> Result<MeasurementScheme> {
    if pointer.dim() != dim {
        return Err(WayError::DimensionMismatch(format!(
            "pointer acts on dimension {}, SWAP on {dim}",
            pointer.dim()
        )));
    }
    MeasurementScheme::unscaled(
        dim,
        dim,
        Coupling::Dense(pauli::swap(dim)),
        PointerPvm::from_observable(pointer)?,
        StateVector::basis(dim, 0),
    )
}

/// Outcomes with the labels of `e` and values `0..k`.
pub(crate) fn indexed_outcomes(e: &OutcomeSet) -> Result<OutcomeSet> {
    OutcomeSet::new(
        e.outcomes()
            .iter()
            .enumerate()
            .map(|(i, o)| Outcome {
                label: o.label.clone(),
                value: i as f64,
            })
            .collect(),
        Geometry::Linear,
    )
}

/// Von Neumann-Lüders scheme `φ ⊗ e_0 ↦ Σ_i P_i φ ⊗ e_i` for a PVM.
pub fn make_lueders(pvm: &DiscreteObservable) -> Result<MeasurementScheme> {
    if !pvm.is_sharp(tol::validation()) {
        return Err(WayError::InvalidObservable("Lüders scheme needs a PVM".into()));
    }
    let (d, k) = (pvm.dim(), pvm.len());
    let u = square_root_coupling(pvm.effects())?;
    let pointer = PointerPvm::computational(pvm.outcomes().clone())
        .or_else(|_| PointerPvm::computational(indexed_outcomes(pvm.outcomes())?))?;
    MeasurementScheme::new(
        d,
        k,
        Coupling::Dense(u),
        pointer,
        StateVector::basis(k, 0),
        pvm.outcomes().clone(),
        (0..k).collect(),
    )
}
