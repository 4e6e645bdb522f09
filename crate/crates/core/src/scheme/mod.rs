//! Measurement schemes `⟨H_A, U, Z, φ_A, f⟩` and their audits.

mod conserved;
mod coupling;
mod pointer;

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use conserved::{ConservedPair, SymmetryOp};
pub use coupling::{square_root_coupling, Coupling};
pub use pointer::PointerPvm;

use crate::error::{Result, WayError};
use crate::obs::{observable_distance, DiscreteObservable, OutcomeSet};
use crate::qcore::{apply_right_factor, herm_op_norm, op_norm, op_norm_implicit, ComplexMatrix, DensityOperator, StateVector};
use crate::tol;

/// Above this total dimension commutator norms are taken matrix-free.
const DENSE_AUDIT_LIMIT: usize = 160;

/// The conditional expectation `Γ_σ`: `tr[ρ Γ_σ(Λ)] = tr[(ρ ⊗ σ) Λ]` for all ρ.
pub fn restrict(lam: &ComplexMatrix, sigma: &DensityOperator) -> Result<ComplexMatrix> {
    let a = sigma.dim();
    if !lam.is_square() || !lam.rows().is_multiple_of(a) {
        return Err(WayError::DimensionMismatch(format!(
            "operator of size {}x{} does not factor over an apparatus of dimension {a}",
            lam.rows(),
            lam.cols()
        )));
    }
    let s = lam.rows() / a;
    let sm = sigma.matrix();
    Ok(ComplexMatrix::from_fn(s, s, |i, j| {
        let mut acc = C64::new(0.0, 0.0);
        for p in 0..a {
            for q in 0..a {
                acc += lam[(i * a + p, j * a + q)] * sm[(q, p)];
            }
        }
        acc
    }))
}

/// A measurement scheme: coupling `U` on `S ⊗ A`, a PVM pointer on `A`, a
/// vector preparation `φ_A`, and a relabelling `f` of pointer outcomes onto
/// a target outcome set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme", into = "RawScheme")]
pub struct MeasurementScheme {
    system_dim: usize,
    apparatus_dim: usize,
    coupling: Coupling,
    pointer: PointerPvm,
    apparatus_state: StateVector,
    targets: OutcomeSet,
    relabel: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawScheme {
    system_dim: usize,
    apparatus_dim: usize,
    coupling: Coupling,
    pointer: PointerPvm,
    apparatus_state: StateVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    targets: Option<OutcomeSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    relabel: Option<BTreeMap<String, String>>,
}

impl TryFrom<RawScheme> for MeasurementScheme {
    type Error = WayError;

    fn try_from(r: RawScheme) -> Result<Self> {
        let targets = r.targets.unwrap_or_else(|| r.pointer.outcomes().clone());
        let relabel = match r.relabel {
            None => r
                .pointer
                .outcomes()
                .labels()
                .map(|l| targets.index_of(l))
                .collect::<Result<Vec<_>>>()?,
            Some(map) => {
                let mut out = Vec::with_capacity(r.pointer.outcomes().len());
                for l in r.pointer.outcomes().labels() {
                    let t = map
                        .get(l)
                        .ok_or_else(|| WayError::InvalidScheme(format!("relabel has no entry for pointer outcome {l:?}")))?;
                    out.push(targets.index_of(t)?);
                }
                if let Some(extra) = map.keys().find(|k| r.pointer.outcomes().index_of(k).is_err()) {
                    return Err(WayError::UnknownOutcome(extra.clone()));
                }
                out
            }
        };
        MeasurementScheme::new(
            r.system_dim,
            r.apparatus_dim,
            r.coupling,
            r.pointer,
            r.apparatus_state,
            targets,
            relabel,
        )
    }
}

impl From<MeasurementScheme> for RawScheme {
    fn from(m: MeasurementScheme) -> Self {
        let identity = m.targets == *m.pointer.outcomes() && m.relabel.iter().enumerate().all(|(i, &t)| i == t);
        let (targets, relabel) = if identity {
            (None, None)
        } else {
            let map = m
                .pointer
                .outcomes()
                .labels()
                .zip(&m.relabel)
                .map(|(l, &t)| (l.to_string(), m.targets.outcomes()[t].label.clone()))
                .collect();
            (Some(m.targets.clone()), Some(map))
        };
        RawScheme {
            system_dim: m.system_dim,
            apparatus_dim: m.apparatus_dim,
            coupling: m.coupling,
            pointer: m.pointer,
            apparatus_state: m.apparatus_state,
            targets,
            relabel,
        }
    }
}

impl MeasurementScheme {
    /// `relabel[x]` is the target outcome index of pointer outcome `x`.
    pub fn new(
        system_dim: usize,
        apparatus_dim: usize,
        coupling: Coupling,
        pointer: PointerPvm,
        apparatus_state: StateVector,
        targets: OutcomeSet,
        relabel: Vec<usize>,
    ) -> Result<Self> {
        if system_dim == 0 || apparatus_dim == 0 {
            return Err(WayError::InvalidScheme("dimensions must be positive".into()));
        }
        let total = system_dim
            .checked_mul(apparatus_dim)
            .ok_or(WayError::TooLarge { dim: usize::MAX, max: tol::max_dim() })?;
        if total > tol::max_dim() {
            return Err(WayError::TooLarge { dim: total, max: tol::max_dim() });
        }
        if coupling.dim() != total {
            return Err(WayError::DimensionMismatch(format!(
                "coupling has dimension {}, expected {system_dim}x{apparatus_dim} = {total}",
                coupling.dim()
            )));
        }
        coupling.validate(tol::validation())?;
        if pointer.dim() != apparatus_dim {
            return Err(WayError::DimensionMismatch(format!(
                "pointer acts on dimension {}, apparatus has {apparatus_dim}",
                pointer.dim()
            )));
        }
        if apparatus_state.dim() != apparatus_dim {
            return Err(WayError::DimensionMismatch(format!(
                "apparatus state has dimension {}, apparatus has {apparatus_dim}",
                apparatus_state.dim()
            )));
        }
        if relabel.len() != pointer.outcomes().len() {
            return Err(WayError::InvalidScheme(format!(
                "relabel covers {} of {} pointer outcomes",
                relabel.len(),
                pointer.outcomes().len()
            )));
        }
        if let Some(&bad) = relabel.iter().find(|&&t| t >= targets.len()) {
            return Err(WayError::InvalidScheme(format!("relabel points at missing target {bad}")));
        }
        Ok(Self {
            system_dim,
            apparatus_dim,
            coupling,
            pointer,
            apparatus_state,
            targets,
            relabel,
        })
    }

    /// A scheme whose targets are the pointer outcomes themselves.
    pub fn unscaled(
        system_dim: usize,
        apparatus_dim: usize,
        coupling: Coupling,
        pointer: PointerPvm,
        apparatus_state: StateVector,
    ) -> Result<Self> {
        let targets = pointer.outcomes().clone();
        let relabel = (0..targets.len()).collect();
        Self::new(system_dim, apparatus_dim, coupling, pointer, apparatus_state, targets, relabel)
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn apparatus_dim(&self) -> usize {
        self.apparatus_dim
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim * self.apparatus_dim
    }

    pub fn coupling(&self) -> &Coupling {
        &self.coupling
    }

    pub fn pointer(&self) -> &PointerPvm {
        &self.pointer
    }

    pub fn apparatus_state(&self) -> &StateVector {
        &self.apparatus_state
    }

    pub fn targets(&self) -> &OutcomeSet {
        &self.targets
    }

    pub fn relabel(&self) -> &[usize] {
        &self.relabel
    }

    /// Same scheme with a different apparatus preparation.
    pub fn with_apparatus_state(&self, state: StateVector) -> Result<Self> {
        let mut m = self.clone();
        if state.dim() != self.apparatus_dim {
            return Err(WayError::DimensionMismatch("apparatus state dimension".into()));
        }
        m.apparatus_state = state;
        Ok(m)
    }

    /// `U*(I ⊗ Z(x))U` for the pointer outcome labelled `x`.
    pub fn heisenberg_pointer(&self, x: &str) -> Result<ComplexMatrix> {
        let k = self.pointer.outcomes().index_of(x)?;
        let z = ComplexMatrix::identity(self.system_dim).kron(&self.pointer.projection(k));
        Ok(self.coupling.conjugate(&z))
    }

    /// The pointer read on the target scale, `Σ_x value(f(x)) Z(x)`.
    pub fn scaled_pointer(&self) -> ComplexMatrix {
        let tv = self.targets.values();
        let w: Vec<f64> = self.relabel.iter().map(|&t| tv[t]).collect();
        self.pointer.weighted_operator(&w)
    }

    /// Columns `(I ⊗ B*) U (e_i ⊗ φ_A)`, i.e. evolved product states written
    /// in the pointer eigenbasis.
    fn evolved_in_pointer_frame(&self) -> Vec<Vec<C64>> {
        let (s, a) = (self.system_dim, self.apparatus_dim);
        let phi = self.apparatus_state.amplitudes();
        let badj = self.pointer.basis().adjoint();
        (0..s)
            .map(|i| {
                let mut v = vec![C64::new(0.0, 0.0); s * a];
                v[i * a..(i + 1) * a].copy_from_slice(phi);
                apply_right_factor(&badj, s, &self.coupling.apply(&v))
            })
            .collect()
    }

    /// Pointer-basis columns grouped by target outcome.
    fn target_columns(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.targets.len()];
        for (c, &x) in self.pointer.partition().iter().enumerate() {
            groups[self.relabel[x]].push(c);
        }
        groups
    }

    /// The observable fixed by the operator-level PRC,
    /// `E(y) = V_φ* U* (I ⊗ Z(f⁻¹(y))) U V_φ`.
    pub fn measured_observable(&self) -> DiscreteObservable {
        let (s, a) = (self.system_dim, self.apparatus_dim);
        let w = self.evolved_in_pointer_frame();
        let effects = self
            .target_columns()
            .iter()
            .map(|cols| {
                let mut e = ComplexMatrix::zeros(s, s);
                for i in 0..s {
                    for k in i..s {
                        let mut acc = C64::new(0.0, 0.0);
                        for j in 0..s {
                            for &c in cols {
                                acc += w[i][j * a + c].conj() * w[k][j * a + c];
                            }
                        }
                        e[(i, k)] = acc;
                        e[(k, i)] = acc.conj();
                    }
                }
                e
            })
            .collect();
        DiscreteObservable::new_unchecked(self.targets.clone(), effects).expect("effects are square")
    }

    /// Effect-wise operator-norm distance between the measured observable
    /// and `target`.
    pub fn prc_defect(&self, target: &DiscreteObservable) -> Result<f64> {
        if target.outcomes().labels().ne(self.targets.labels()) {
            return Err(WayError::OutcomeMismatch(
                "target outcomes differ from the scheme's relabel codomain".into(),
            ));
        }
        observable_distance(&self.measured_observable(), target)
    }

    /// `max_y ‖V_φ*U*(E(y) ⊗ Z(f⁻¹y))UV_φ − E(y)‖`.
    pub fn repeatability_defect(&self) -> f64 {
        let (s, a) = (self.system_dim, self.apparatus_dim);
        let w = self.evolved_in_pointer_frame();
        let measured = self.measured_observable();
        let mut worst: f64 = 0.0;
        for (e, cols) in measured.effects().iter().zip(self.target_columns()) {
            let mut r = ComplexMatrix::zeros(s, s);
            let moved: Vec<Vec<C64>> = w
                .iter()
                .map(|wk| {
                    let mut t = vec![C64::new(0.0, 0.0); s * a];
                    for j in 0..s {
                        for l in 0..s {
                            let ejl = e[(j, l)];
                            for &c in &cols {
                                t[j * a + c] += ejl * wk[l * a + c];
                            }
                        }
                    }
                    t
                })
                .collect();
            for i in 0..s {
                for k in 0..s {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..s {
                        for &c in &cols {
                            acc += w[i][j * a + c].conj() * moved[k][j * a + c];
                        }
                    }
                    r[(i, k)] = acc;
                }
            }
            worst = worst.max(herm_op_norm(&r.sub_mat(e).hermitian_part()));
        }
        worst
    }

    fn check_pair(&self, c: &ConservedPair) -> Result<()> {
        if c.l_sys().rows() != self.system_dim || c.l_app().rows() != self.apparatus_dim {
            return Err(WayError::DimensionMismatch(format!(
                "conserved pair acts on {}x{}, scheme is {}x{}",
                c.l_sys().rows(),
                c.l_app().rows(),
                self.system_dim,
                self.apparatus_dim
            )));
        }
        Ok(())
    }

    /// `‖[U, L]‖`, with `L` replaced by its cyclic group unitary for
    /// periodic pairs.
    pub fn conservation_defect(&self, c: &ConservedPair) -> Result<f64> {
        self.check_pair(c)?;
        let sym = c.symmetry_op();
        if self.total_dim() <= DENSE_AUDIT_LIMIT {
            return Ok(op_norm(&self.coupling.commutator_with(&sym.to_dense())));
        }
        let u = &self.coupling;
        Ok(op_norm_implicit(
            self.total_dim(),
            |v| sub(&u.apply(&sym.apply(v)), &sym.apply(&u.apply(v))),
            |v| sub(&sym.apply_adjoint(&u.apply_adjoint(v)), &u.apply_adjoint(&sym.apply_adjoint(v))),
        ))
    }

    /// `‖[Z, L_A]‖` for the pointer operator `Z = Σ value(x) Z(x)`; zero
    /// exactly when every pointer projection commutes with `L_A`.
    pub fn yanase_defect(&self, c: &ConservedPair) -> Result<f64> {
        self.check_pair(c)?;
        let z = self.pointer.operator();
        let l = c.apparatus_op();
        Ok(op_norm(&z.matmul(&l).sub_mat(&l.matmul(&z))))
    }

    /// `‖[U*(I ⊗ Z)U, L]‖`.
    pub fn weak_yanase_defect(&self, c: &ConservedPair) -> Result<f64> {
        self.check_pair(c)?;
        let sym = c.symmetry_op();
        let z = self.pointer.operator();
        let s = self.system_dim;
        if self.total_dim() <= DENSE_AUDIT_LIMIT {
            let h = self.coupling.conjugate(&ComplexMatrix::identity(s).kron(&z));
            let l = sym.to_dense();
            return Ok(op_norm(&h.matmul(&l).sub_mat(&l.matmul(&h))));
        }
        let u = &self.coupling;
        let h = |v: &[C64]| u.apply_adjoint(&apply_right_factor(&z, s, &u.apply(v)));
        Ok(op_norm_implicit(
            self.total_dim(),
            |v| sub(&h(&sym.apply(v)), &sym.apply(&h(v))),
            |v| sub(&sym.apply_adjoint(&h(v)), &h(&sym.apply_adjoint(v))),
        ))
    }
}

fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

#[cfg(test)]
mod tests;
