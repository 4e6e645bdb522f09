use crate::error::{Result, WayError};
use crate::obs::{DiscreteObservable, Geometry, Outcome, OutcomeSet};
use crate::qcore::StateVector;
use crate::scheme::{square_root_coupling, Coupling, MeasurementScheme, PointerPvm};
use crate::tol;

/// A square-root (Lüders-type) scheme for `e`: `ψ ⊗ e_0 ↦ Σ_x √E(x)ψ ⊗ e_x`
/// completed to a unitary, read out in the pointer's computational basis.
pub fn relational_scheme(e: &DiscreteObservable) -> Result<MeasurementScheme> {
    let d = e.dim();
    let k = e.len();
    let total = d.saturating_mul(k);
    if total > tol::max_dim() {
        return Err(WayError::TooLarge { dim: total, max: tol::max_dim() });
    }
    let u = square_root_coupling(e.effects())?;
    // pointer values are outcome indices so they are distinct even when the
    // target values repeat
    let pointer_outcomes = OutcomeSet::new(
        e.outcomes()
            .outcomes()
            .iter()
            .enumerate()
            .map(|(i, o)| Outcome {
                label: o.label.clone(),
                value: i as f64,
            })
            .collect(),
        Geometry::Linear,
    )?;
    MeasurementScheme::new(
        d,
        k,
        Coupling::Dense(u),
        PointerPvm::computational(pointer_outcomes)?,
        StateVector::basis(k, 0),
        e.outcomes().clone(),
        (0..k).collect(),
    )
}
