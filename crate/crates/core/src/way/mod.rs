//! Noise-operator error bounds, WAY-theorem audits and error-versus-spread
//! sweeps.

mod sweep;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

pub use sweep::{error_vs_spread_sweep, SweepOptions, SweepRow};

use crate::error::{Result, WayError};
use crate::obs::DiscreteObservable;
use crate::qcore::{apply_left_factor, apply_right_factor, inner, op_norm, ComplexMatrix, StateVector};
use crate::scheme::{ConservedPair, MeasurementScheme, SymmetryOp};
use crate::tol;

/// State-wise noise `ε² = ⟨N²⟩` with `N = U*(I⊗Z)U − A⊗I` and the
/// Robertson lower bound `|⟨[N, L]⟩|² / (4 ΔL²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseReport {
    pub epsilon_sq: f64,
    pub bound_rhs: f64,
    pub delta_l_sq: f64,
    pub commutator_expect: C64,
    /// `ΔL² = 0`; `bound_rhs` is then reported as 0.
    pub degenerate: bool,
}

impl NoiseReport {
    /// `ε²·ΔL² ≥ |⟨[N, L]⟩|²/4` up to `slack`.
    pub fn robertson_holds(&self, slack: f64) -> bool {
        self.epsilon_sq * self.delta_l_sq + slack >= self.commutator_expect.norm_sqr() / 4.0
    }
}

pub fn noise_report(
    m: &MeasurementScheme,
    c: &ConservedPair,
    a: &ComplexMatrix,
    phi: &StateVector,
) -> Result<NoiseReport> {
    let s = m.system_dim();
    if a.rows() != s || phi.dim() != s {
        return Err(WayError::DimensionMismatch(format!(
            "observable and state must act on the system of dimension {s}"
        )));
    }
    if c.l_sys().rows() != s || c.l_app().rows() != m.apparatus_dim() {
        return Err(WayError::DimensionMismatch("conserved pair does not match the scheme".into()));
    }
    a.ensure_hermitian(tol::validation())?;
    let psi = phi.tensor(m.apparatus_state());
    let psi = psi.amplitudes();
    let u = m.coupling();
    let z = m.scaled_pointer();
    let heis = u.apply_adjoint(&apply_right_factor(&z, s, &u.apply(psi)));
    let apsi = apply_left_factor(a, m.apparatus_dim(), psi);
    let npsi: Vec<C64> = heis.iter().zip(&apsi).map(|(x, y)| x - y).collect();
    let lpsi = SymmetryOp::Sum(c.l_sys().clone(), c.l_app().clone()).apply(psi);

    let epsilon_sq = npsi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let commutator_expect = C64::new(0.0, 2.0 * inner(&npsi, &lpsi).im);
    let delta_l_sq = phi.variance(c.l_sys()) + m.apparatus_state().variance(c.l_app());
    let degenerate = delta_l_sq <= tol::construction();
    let bound_rhs = if degenerate {
        0.0
    } else {
        commutator_expect.norm_sqr() / (4.0 * delta_l_sq)
    };
    Ok(NoiseReport {
        epsilon_sq,
        bound_rhs,
        delta_l_sq,
        commutator_expect,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    Conservation,
    /// Neither the Yanase condition nor repeatability holds.
    Yanase,
    Exactness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "failed")]
pub enum Verdict {
    Consistent,
    HypothesisViolated(Vec<Hypothesis>),
    /// An exact, conserving, Yanase-or-repeatable measurement of an
    /// observable that does not commute with `L_S`. Signals a bug.
    ExactMeasurementOfNoninvariant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WayAudit {
    pub conservation_defect: f64,
    pub conservation_ok: bool,
    pub yanase_defect: f64,
    pub yanase_ok: bool,
    pub repeatability_defect: f64,
    pub prc_defect_vs_target: f64,
    /// `‖[A, L_S]‖` for the target's first moment `A`.
    pub commutator_norm: f64,
    pub verdict: Verdict,
}

/// Audits one instance of the WAY theorem at tolerance `tol`.
pub fn way_audit(
    m: &MeasurementScheme,
    c: &ConservedPair,
    target: &DiscreteObservable,
    tol: f64,
) -> Result<WayAudit> {
    if !target.is_sharp(tol::validation()) {
        return Err(WayError::InvalidObservable("WAY audit needs a sharp target".into()));
    }
    let conservation_defect = m.conservation_defect(c)?;
    let yanase_defect = m.yanase_defect(c)?;
    let repeatability_defect = m.repeatability_defect();
    let prc_defect_vs_target = m.prc_defect(target)?;
    let a = target.first_moment();
    let l = c.system_op();
    let commutator_norm = op_norm(&a.matmul(&l).sub_mat(&l.matmul(&a)));

    let conservation_ok = conservation_defect < tol;
    let yanase_ok = yanase_defect < tol;
    let repeatable = repeatability_defect < tol;
    let exact = prc_defect_vs_target < tol;

    let mut failed = Vec::new();
    if !conservation_ok {
        failed.push(Hypothesis::Conservation);
    }
    if !(yanase_ok || repeatable) {
        failed.push(Hypothesis::Yanase);
    }
    let verdict = if !failed.is_empty() {
        if !exact {
            failed.push(Hypothesis::Exactness);
        }
        Verdict::HypothesisViolated(failed)
    } else if exact && commutator_norm > tol {
        Verdict::ExactMeasurementOfNoninvariant
    } else {
        Verdict::Consistent
    };
    Ok(WayAudit {
        conservation_defect,
        conservation_ok,
        yanase_defect,
        yanase_ok,
        repeatability_defect,
        prc_defect_vs_target,
        commutator_norm,
        verdict,
    })
}
