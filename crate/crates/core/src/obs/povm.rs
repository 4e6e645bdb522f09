use num_complex::Complex64 as C64;

use super::dist::ProbDist;
use super::outcome::{Geometry, Outcome, OutcomeSet};
use crate::error::{Result, WayError};
use crate::qcore::{herm_eig, herm_op_norm, min_eigenvalue, ComplexMatrix, DensityOperator};
use crate::tol;

/// A POVM with finitely many outcomes: one effect per outcome label.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteObservable {
    outcomes: OutcomeSet,
    effects: Vec<ComplexMatrix>,
}

/// Result of [`validate_povm`].
#[derive(Debug, Clone, PartialEq)]
pub struct PovmReport {
    /// Largest `max(0, -λ_min)` over effects, plus any self-adjointness residual.
    pub positivity_violation: f64,
    /// `op_norm(Σ E(x) - I)`.
    pub normalisation_residual: f64,
    pub ok: bool,
}

impl DiscreteObservable {
    /// Validating constructor.
    pub fn new(outcomes: OutcomeSet, effects: Vec<ComplexMatrix>) -> Result<Self> {
        let obs = Self::new_unchecked(outcomes, effects)?;
        let report = validate_povm(&obs);
        if !report.ok {
            return Err(WayError::InvalidObservable(format!(
                "positivity violation {:.3e}, normalisation residual {:.3e}",
                report.positivity_violation, report.normalisation_residual
            )));
        }
        Ok(obs)
    }

    /// Checks only shapes; positivity and normalisation are left to
    /// [`validate_povm`].
    pub fn new_unchecked(outcomes: OutcomeSet, effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.len() != outcomes.len() {
            return Err(WayError::InvalidObservable(format!(
                "{} effects for {} outcomes",
                effects.len(),
                outcomes.len()
            )));
        }
        let d = effects[0].rows();
        if effects.iter().any(|e| !e.is_square() || e.rows() != d) {
            return Err(WayError::DimensionMismatch(
                "effects must be square on a common dimension".into(),
            ));
        }
        Ok(Self { outcomes, effects })
    }

    /// Scalar-effect observable `{p_x I}`.
    pub fn trivial(outcomes: OutcomeSet, weights: &[f64], dim: usize) -> Result<Self> {
        let effects = weights
            .iter()
            .map(|&w| ComplexMatrix::identity(dim).scale_re(w))
            .collect();
        Self::new(outcomes, effects)
    }

    /// Projections onto the computational basis, outcome `k` labelled `k`.
    pub fn computational(dim: usize, geometry: Geometry) -> Self {
        let outcomes = match geometry {
            Geometry::Cyclic(_) => OutcomeSet::cyclic_positions(dim),
            Geometry::Linear => {
                let vals: Vec<f64> = (0..dim).map(|k| k as f64).collect();
                OutcomeSet::from_values(&vals, Geometry::Linear).expect("distinct values")
            }
        };
        let effects = (0..dim)
            .map(|k| {
                let mut p = ComplexMatrix::zeros(dim, dim);
                p[(k, k)] = C64::new(1.0, 0.0);
                p
            })
            .collect();
        Self { outcomes, effects }
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn effect(&self, label: &str) -> Result<&ComplexMatrix> {
        Ok(&self.effects[self.outcomes.index_of(label)?])
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// `E(x)² = E(x)` for every outcome, within `tol`.
    pub fn is_sharp(&self, tol: f64) -> bool {
        self.effects
            .iter()
            .all(|e| e.matmul(e).sub_mat(e).max_abs() <= tol)
    }

    /// First moment operator `Σ value(x) E(x)`.
    pub fn first_moment(&self) -> ComplexMatrix {
        self.outcomes
            .outcomes()
            .iter()
            .zip(&self.effects)
            .fold(ComplexMatrix::zeros(self.dim(), self.dim()), |acc, (o, e)| {
                acc.add_mat(&e.scale_re(o.value))
            })
    }

    /// Applies a linear map effect-wise, keeping the outcome set.
    pub fn map_effects(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        Self::new(self.outcomes.clone(), self.effects.iter().map(f).collect())
    }
}

pub fn validate_povm(obs: &DiscreteObservable) -> PovmReport {
    let d = obs.dim();
    let mut positivity: f64 = 0.0;
    let mut sum = ComplexMatrix::zeros(d, d);
    for e in &obs.effects {
        positivity = positivity.max(e.hermitian_residual());
        positivity = positivity.max(-min_eigenvalue(e));
        sum = sum.add_mat(e);
    }
    let normalisation = herm_op_norm(&sum.sub_mat(&ComplexMatrix::identity(d)).hermitian_part());
    let t = tol::validation();
    PovmReport {
        positivity_violation: positivity,
        normalisation_residual: normalisation,
        ok: positivity <= t && normalisation <= t,
    }
}

/// Spectral measure of a self-adjoint matrix. Eigenvalues closer than
/// `merge_tol` share an outcome; outcomes are listed by descending value.
pub fn spectral_pvm(a: &ComplexMatrix, merge_tol: f64) -> Result<DiscreteObservable> {
    let eig = herm_eig(a)?;
    let n = eig.values.len();
    // clusters of ascending eigen-indices
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match clusters.last_mut() {
            Some(c) if eig.values[k] - eig.values[*c.last().unwrap()] <= merge_tol => c.push(k),
            _ => clusters.push(vec![k]),
        }
    }
    clusters.reverse();
    let mut values = Vec::with_capacity(clusters.len());
    let mut effects = Vec::with_capacity(clusters.len());
    for c in &clusters {
        let mean = c.iter().map(|&k| eig.values[k]).sum::<f64>() / c.len() as f64;
        values.push(mean);
        let mut p = ComplexMatrix::zeros(n, n);
        for &k in c {
            let v = eig.vectors.column(k);
            p = p.add_mat(&ComplexMatrix::outer(&v, &v));
        }
        effects.push(p);
    }
    let outcomes = OutcomeSet::from_values(&values, Geometry::Linear).or_else(|_| {
        // distinct clusters can still print identically; fall back to indices
        let o = values
            .iter()
            .enumerate()
            .map(|(i, &v)| Outcome {
                label: format!("e{i}"),
                value: v,
            })
            .collect();
        OutcomeSet::new(o, Geometry::Linear)
    })?;
    DiscreteObservable::new_unchecked(outcomes, effects)
}

/// Default eigenvalue merge tolerance for [`spectral_pvm`].
pub const DEFAULT_MERGE_TOL: f64 = 1e-8;

/// Born-rule statistics `x ↦ tr[ρ E(x)]`.
pub fn born(rho: &DensityOperator, obs: &DiscreteObservable) -> Result<ProbDist> {
    if rho.dim() != obs.dim() {
        return Err(WayError::DimensionMismatch(format!(
            "state of dim {} with observable of dim {}",
            rho.dim(),
            obs.dim()
        )));
    }
    let w: Vec<f64> = obs.effects.iter().map(|e| rho.expect(e).re).collect();
    let t = tol::construction();
    let w: Vec<f64> = w.into_iter().map(|x| if x < 0.0 && x >= -t { 0.0 } else { x }).collect();
    let total: f64 = w.iter().sum();
    ProbDist::new(obs.outcomes.clone(), w.into_iter().map(|x| x / total).collect())
}

/// Cyclic smearing `E(x) = Σ_y kernel(x ⊖ y) P(y)` of a sharp observable.
pub fn smear_cyclic(pvm: &DiscreteObservable, kernel: &ProbDist) -> Result<DiscreteObservable> {
    let n = match (pvm.outcomes.geometry(), kernel.outcomes().geometry()) {
        (Geometry::Cyclic(a), Geometry::Cyclic(b)) if a == b => a,
        _ => {
            return Err(WayError::OutcomeMismatch(
                "smearing needs matching cyclic geometries".into(),
            ))
        }
    };
    if !pvm.is_sharp(tol::validation()) {
        return Err(WayError::InvalidObservable("smear_cyclic expects a PVM".into()));
    }
    let d = pvm.dim();
    let k = kernel.weights();
    let effects = (0..n)
        .map(|x| {
            (0..n).fold(ComplexMatrix::zeros(d, d), |acc, y| {
                let w = k[(x + n - y) % n];
                if w == 0.0 {
                    acc
                } else {
                    acc.add_mat(&pvm.effects[y].scale_re(w))
                }
            })
        })
        .collect();
    DiscreteObservable::new(pvm.outcomes.clone(), effects)
}

fn check_same_shape(e1: &DiscreteObservable, e2: &DiscreteObservable) -> Result<()> {
    if e1.dim() != e2.dim() {
        return Err(WayError::DimensionMismatch(format!(
            "observables on dims {} and {}",
            e1.dim(),
            e2.dim()
        )));
    }
    let same = e1.outcomes.len() == e2.outcomes.len()
        && e1.outcomes.labels().zip(e2.outcomes.labels()).all(|(a, b)| a == b);
    if !same {
        return Err(WayError::OutcomeMismatch("observables have different outcome labels".into()));
    }
    Ok(())
}

/// `max_x ‖E1(x) - E2(x)‖`: the worst-case Born-probability discrepancy.
pub fn observable_distance(e1: &DiscreteObservable, e2: &DiscreteObservable) -> Result<f64> {
    check_same_shape(e1, e2)?;
    Ok(e1
        .effects
        .iter()
        .zip(&e2.effects)
        .map(|(a, b)| herm_op_norm(&a.sub_mat(b).hermitian_part()))
        .fold(0.0, f64::max))
}

/// Every pair of effects commutes within the validation tolerance.
pub fn compatible(e1: &DiscreteObservable, e2: &DiscreteObservable) -> bool {
    if e1.dim() != e2.dim() {
        return false;
    }
    let t = tol::validation();
    e1.effects.iter().all(|a| {
        e2.effects
            .iter()
            .all(|b| a.matmul(b).sub_mat(&b.matmul(a)).max_abs() <= t)
    })
}
