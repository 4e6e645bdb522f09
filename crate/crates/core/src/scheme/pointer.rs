use std::collections::HashSet;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};
use crate::obs::{DiscreteObservable, OutcomeSet};
use crate::qcore::{herm_eig, ComplexMatrix};
use crate::tol;

/// A projection-valued pointer observable, stored as an orthonormal
/// eigenbasis plus an assignment of basis vectors to outcomes. Projectivity
/// holds by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPointer", into = "RawPointer")]
pub struct PointerPvm {
    outcomes: OutcomeSet,
    basis: ComplexMatrix,
    partition: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawPointer {
    outcomes: OutcomeSet,
    basis: ComplexMatrix,
    partition: Vec<usize>,
}

impl TryFrom<RawPointer> for PointerPvm {
    type Error = WayError;

    fn try_from(r: RawPointer) -> Result<Self> {
        PointerPvm::new(r.outcomes, r.basis, r.partition)
    }
}

impl From<PointerPvm> for RawPointer {
    fn from(p: PointerPvm) -> Self {
        RawPointer {
            outcomes: p.outcomes,
            basis: p.basis,
            partition: p.partition,
        }
    }
}

impl PointerPvm {
    /// `basis` must be unitary; column `c` belongs to outcome `partition[c]`.
    /// Outcome values must be distinct so that the PVM is the spectral
    /// measure of its first-moment operator.
    pub fn new(outcomes: OutcomeSet, basis: ComplexMatrix, partition: Vec<usize>) -> Result<Self> {
        basis.ensure_unitary(tol::validation()).map_err(|e| match e {
            WayError::NotUnitary { residual } => {
                WayError::InvalidObservable(format!("pointer basis is not unitary (residual {residual:.3e})"))
            }
            other => other,
        })?;
        if partition.len() != basis.cols() {
            return Err(WayError::InvalidObservable(format!(
                "partition has {} entries for {} basis vectors",
                partition.len(),
                basis.cols()
            )));
        }
        if let Some(&bad) = partition.iter().find(|&&k| k >= outcomes.len()) {
            return Err(WayError::InvalidObservable(format!(
                "partition refers to outcome {bad}, only {} outcomes",
                outcomes.len()
            )));
        }
        let mut seen = HashSet::new();
        for v in outcomes.values() {
            if !seen.insert(v.to_bits()) {
                return Err(WayError::InvalidObservable(format!(
                    "pointer outcome value {v} is repeated"
                )));
            }
        }
        Ok(Self {
            outcomes,
            basis,
            partition,
        })
    }

    /// Projections onto computational basis vectors, one outcome each.
    pub fn computational(outcomes: OutcomeSet) -> Result<Self> {
        let n = outcomes.len();
        Self::new(outcomes, ComplexMatrix::identity(n), (0..n).collect())
    }

    /// Recovers basis and partition from a sharp observable.
    pub fn from_observable(obs: &DiscreteObservable) -> Result<Self> {
        if !obs.is_sharp(tol::validation()) {
            return Err(WayError::InvalidObservable("pointer must be projection-valued".into()));
        }
        let d = obs.dim();
        let mut cols = Vec::with_capacity(d);
        let mut partition = Vec::with_capacity(d);
        for (k, e) in obs.effects().iter().enumerate() {
            let eig = herm_eig(e)?;
            for (j, &lam) in eig.values.iter().enumerate() {
                if lam > 0.5 {
                    cols.push(eig.vectors.column(j));
                    partition.push(k);
                }
            }
        }
        if cols.len() != d {
            return Err(WayError::InvalidObservable(format!(
                "projection ranks add up to {} on a space of dimension {d}",
                cols.len()
            )));
        }
        Self::new(obs.outcomes().clone(), ComplexMatrix::from_columns(&cols), partition)
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// `Z(x)` for outcome index `x`.
    pub fn projection(&self, x: usize) -> ComplexMatrix {
        let d = self.dim();
        let cols: Vec<usize> = (0..d).filter(|&c| self.partition[c] == x).collect();
        ComplexMatrix::from_fn(d, d, |i, j| {
            cols.iter()
                .map(|&c| self.basis[(i, c)] * self.basis[(j, c)].conj())
                .sum()
        })
    }

    /// `Σ_x w(x) Z(x)` for outcome weights `w`.
    pub fn weighted_operator(&self, weights: &[f64]) -> ComplexMatrix {
        let d = self.dim();
        let w: Vec<f64> = self.partition.iter().map(|&k| weights[k]).collect();
        ComplexMatrix::from_fn(d, d, |i, j| {
            (0..d)
                .map(|c| self.basis[(i, c)] * w[c] * self.basis[(j, c)].conj())
                .sum::<C64>()
        })
    }

    /// The pointer operator `Z = Σ_x value(x) Z(x)`.
    pub fn operator(&self) -> ComplexMatrix {
        self.weighted_operator(&self.outcomes.values())
    }

    pub fn to_observable(&self) -> DiscreteObservable {
        let effects = (0..self.outcomes.len()).map(|x| self.projection(x)).collect();
        DiscreteObservable::new_unchecked(self.outcomes.clone(), effects).expect("shapes agree")
    }
}
