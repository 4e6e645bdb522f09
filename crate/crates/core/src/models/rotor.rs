use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Result, WayError};
use crate::obs::DiscreteObservable;
use crate::qcore::ComplexMatrix;
use crate::relfr::{CovariantObservable, CyclicGroup, Representation};

use super::simple::fourier_observable;

/// A system representation, a covariant reference and the target measured
/// relative to that reference.
#[derive(Debug, Clone)]
pub struct RelativisationSetup {
    pub rep_s: Representation,
    pub reference: CovariantObservable,
    pub target: DiscreteObservable,
}

/// Qubit `L_S = diag(0, 1)` against an `n`-level rotor `L_R = diag(0..n)`,
/// with the angle PVM on `|θ_m⟩ = n^{-1/2} Σ_j e^{2πijm/n}|j⟩` as
/// reference and `σ_x` as target.
pub fn make_qubit_rotor(n: usize) -> Result<RelativisationSetup> {
    if n < 2 {
        return Err(WayError::OutOfRange(format!("rotor needs n >= 2, got {n}")));
    }
    let g = CyclicGroup::new(n)?;
    let rep_s = Representation::new(g, ComplexMatrix::from_real_diag(&[0.0, 1.0]))?;
    let levels: Vec<f64> = (0..n).map(|j| j as f64).collect();
    let rep_r = Representation::new(g, ComplexMatrix::from_real_diag(&levels))?;
    let amp = 1.0 / (n as f64).sqrt();
    let effects = (0..n)
        .map(|m| {
            let v: Vec<C64> = (0..n)
                .map(|j| C64::from_polar(amp, 2.0 * PI * ((j * m) % n) as f64 / n as f64))
                .collect();
            ComplexMatrix::outer(&v, &v)
        })
        .collect();
    let angle = DiscreteObservable::new(CovariantObservable::group_outcomes(n), effects)?;
    Ok(RelativisationSetup {
        rep_s,
        reference: CovariantObservable::new(rep_r, angle)?,
        target: fourier_observable(2),
    })
}
