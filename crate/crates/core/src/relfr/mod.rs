//! Relativisation with respect to a finite cyclic group: representations,
//! covariant reference observables, the yen map `¥` and localisation.

mod localise;
mod relational;
mod yen;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use localise::{high_localisation_audit, localise, localised_state, Budget, Localised, LocalisationRow};
pub(crate) use localise::{candidate_supports, embed, support_basis};
pub use relational::relational_scheme;
pub use yen::{homomorphism_defect, invariance_defect, restricted_yen, yen, yen_povm};

use crate::error::{Result, WayError};
use crate::obs::{DiscreteObservable, OutcomeSet};
use crate::qcore::eig::herm_eig_unchecked;
use crate::qcore::{op_norm, ComplexMatrix, HermEig};
use crate::tol;

/// `Z_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicGroup {
    order: usize,
}

impl CyclicGroup {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(WayError::OutOfRange("group order must be positive".into()));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Canonical representative in `0..N`.
    pub fn reduce(&self, k: i64) -> usize {
        k.rem_euclid(self.order as i64) as usize
    }
}

/// Unitary representation `U(k) = exp(2πik(L − c)/N)` of `Z_N`, where the
/// shift `c` makes the spectrum of `L − c` integral.
#[derive(Debug, Clone)]
pub struct Representation {
    group: CyclicGroup,
    generator: ComplexMatrix,
    shift: f64,
    eig: HermEig,
}

impl Representation {
    pub fn new(group: CyclicGroup, generator: ComplexMatrix) -> Result<Self> {
        generator.ensure_hermitian(tol::validation())?;
        let eig = herm_eig_unchecked(&generator.hermitian_part());
        let lo = eig.values[0];
        let mut shift = lo - lo.floor();
        if shift > 1.0 - 1e-9 {
            shift = 0.0;
        }
        for &v in &eig.values {
            let k = v - shift;
            if (k - k.round()).abs() > 1e-9 {
                return Err(WayError::InvalidRepresentation(format!(
                    "eigenvalue {v} is not an integer translate of {shift}"
                )));
            }
        }
        Ok(Self {
            group,
            generator,
            shift,
            eig,
        })
    }

    pub fn group(&self) -> CyclicGroup {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    pub fn generator(&self) -> &ComplexMatrix {
        &self.generator
    }

    /// The constant `c` with `σ(L) − c ⊂ Z`, σ the spectrum.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Eigen-decomposition of the generator (ascending).
    pub fn eigen(&self) -> &HermEig {
        &self.eig
    }

    pub fn unitary(&self, k: i64) -> ComplexMatrix {
        let n = self.group.order as f64;
        let k = self.group.reduce(k) as f64;
        let c = self.shift;
        self.eig.apply(|x| C64::from_polar(1.0, 2.0 * PI * k * (x - c).round() / n))
    }

    /// `max_{j,k} ‖U(j)U(k) − U(j+k)‖` together with `‖U(N) − I‖`.
    pub fn homomorphism_residual(&self) -> f64 {
        let n = self.group.order as i64;
        let us: Vec<ComplexMatrix> = (0..n).map(|k| self.unitary(k)).collect();
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let d = us[j as usize].matmul(&us[k as usize]).sub_mat(&us[((j + k) % n) as usize]);
                worst = worst.max(d.max_abs());
            }
        }
        worst
    }
}

/// A POVM on `Z_N` (outcome `j` at index `j`) covariant under a
/// representation: `U(k) F(j) U(k)* = F(j + k)`.
#[derive(Debug, Clone)]
pub struct CovariantObservable {
    rep: Representation,
    obs: DiscreteObservable,
}

impl CovariantObservable {
    /// Covariance is checked for the generator `k = 1`; the rest follows by
    /// the homomorphism property.
    pub fn new(rep: Representation, obs: DiscreteObservable) -> Result<Self> {
        let n = rep.group.order;
        if obs.len() != n || obs.dim() != rep.dim() {
            return Err(WayError::GroupMismatch(format!(
                "observable has {} outcomes on dimension {}, representation is Z_{n} on dimension {}",
                obs.len(),
                obs.dim(),
                rep.dim()
            )));
        }
        let c = Self { rep, obs };
        let d = c.covariance_defect();
        if d > 1e-9 {
            return Err(WayError::InvalidObservable(format!("not covariant (defect {d:.3e})")));
        }
        Ok(c)
    }

    pub fn rep(&self) -> &Representation {
        &self.rep
    }

    pub fn obs(&self) -> &DiscreteObservable {
        &self.obs
    }

    pub fn effect(&self, k: i64) -> &ComplexMatrix {
        &self.obs.effects()[self.rep.group.reduce(k)]
    }

    /// `max_j ‖U(1)F(j)U(1)* − F(j+1)‖`.
    pub fn covariance_defect(&self) -> f64 {
        let u = self.rep.unitary(1);
        let ua = u.adjoint();
        (0..self.rep.group.order as i64)
            .map(|j| op_norm(&u.matmul(self.effect(j)).matmul(&ua).sub_mat(self.effect(j + 1))))
            .fold(0.0, f64::max)
    }

    /// `F_μ(k) = (1 − μ) F(k) + μ I / N`, again covariant.
    pub fn unsharpen(&self, mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(WayError::OutOfRange(format!("unsharpness {mu} outside [0, 1]")));
        }
        let n = self.rep.group.order as f64;
        let d = self.rep.dim();
        let flat = ComplexMatrix::identity(d).scale_re(mu / n);
        let obs = self.obs.map_effects(|e| e.scale_re(1.0 - mu).add_mat(&flat))?;
        Ok(Self {
            rep: self.rep.clone(),
            obs,
        })
    }

    /// Outcome set `Z_N` used by covariant observables built here.
    pub fn group_outcomes(n: usize) -> OutcomeSet {
        OutcomeSet::cyclic_positions(n)
    }
}
