use crate::error::{Result, WayError};
use crate::obs::DiscreteObservable;
use crate::qcore::{op_norm, ComplexMatrix, StateVector};

use super::{CovariantObservable, Representation};

fn check_groups(rep_s: &Representation, f: &CovariantObservable) -> Result<()> {
    if rep_s.group() != f.rep().group() {
        return Err(WayError::GroupMismatch(format!(
            "system group Z_{} vs reference group Z_{}",
            rep_s.group().order(),
            f.rep().group().order()
        )));
    }
    Ok(())
}

fn check_system(a: &ComplexMatrix, rep_s: &Representation) -> Result<()> {
    if a.rows() != rep_s.dim() || !a.is_square() {
        return Err(WayError::DimensionMismatch(format!(
            "operator is {}x{}, system representation has dimension {}",
            a.rows(),
            a.cols(),
            rep_s.dim()
        )));
    }
    Ok(())
}

/// `¥(A) = Σ_k U_S(k) A U_S(k)* ⊗ F(k)`.
pub fn yen(a: &ComplexMatrix, rep_s: &Representation, f: &CovariantObservable) -> Result<ComplexMatrix> {
    check_groups(rep_s, f)?;
    check_system(a, rep_s)?;
    let (ds, dr) = (rep_s.dim(), f.rep().dim());
    let mut out = ComplexMatrix::zeros(ds * dr, ds * dr);
    for k in 0..rep_s.group().order() as i64 {
        let u = rep_s.unitary(k);
        let moved = u.matmul(a).matmul(&u.adjoint());
        out = out.add_mat(&moved.kron(f.effect(k)));
    }
    Ok(out)
}

/// Effect-wise `¥`.
pub fn yen_povm(e: &DiscreteObservable, rep_s: &Representation, f: &CovariantObservable) -> Result<DiscreteObservable> {
    let effects = e
        .effects()
        .iter()
        .map(|x| yen(x, rep_s, f))
        .collect::<Result<Vec<_>>>()?;
    DiscreteObservable::new_unchecked(e.outcomes().clone(), effects)
}

/// `max_k ‖(U_S(k)⊗U_R(k)) X (U_S(k)⊗U_R(k))* − X‖`.
pub fn invariance_defect(op_sr: &ComplexMatrix, rep_s: &Representation, rep_r: &Representation) -> Result<f64> {
    if rep_s.group() != rep_r.group() {
        return Err(WayError::GroupMismatch("system and reference groups differ".into()));
    }
    let d = rep_s.dim() * rep_r.dim();
    if op_sr.rows() != d || !op_sr.is_square() {
        return Err(WayError::DimensionMismatch(format!(
            "operator is {}x{}, expected {d}x{d}",
            op_sr.rows(),
            op_sr.cols()
        )));
    }
    let mut worst: f64 = 0.0;
    for k in 1..rep_s.group().order() as i64 {
        let u = rep_s.unitary(k).kron(&rep_r.unitary(k));
        let moved = u.matmul(op_sr).matmul(&u.adjoint());
        worst = worst.max(op_norm(&moved.sub_mat(op_sr)));
    }
    Ok(worst)
}

/// `‖¥(ab) − ¥(a)¥(b)‖`.
pub fn homomorphism_defect(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    rep_s: &Representation,
    f: &CovariantObservable,
) -> Result<f64> {
    let ab = yen(&a.matmul(b), rep_s, f)?;
    let prod = yen(a, rep_s, f)?.matmul(&yen(b, rep_s, f)?);
    Ok(op_norm(&ab.sub_mat(&prod)))
}

/// `Σ_k ⟨η|F(k)|η⟩ U_S(k) a U_S(k)*`, the reference-restricted yen map.
pub fn restricted_yen(
    a: &ComplexMatrix,
    rep_s: &Representation,
    f: &CovariantObservable,
    eta: &StateVector,
) -> Result<ComplexMatrix> {
    check_groups(rep_s, f)?;
    check_system(a, rep_s)?;
    if eta.dim() != f.rep().dim() {
        return Err(WayError::DimensionMismatch("reference state dimension".into()));
    }
    Ok(weighted_average(a, rep_s, &reference_weights(f, eta)))
}

/// `k ↦ ⟨η|F(k)|η⟩`.
pub(crate) fn reference_weights(f: &CovariantObservable, eta: &StateVector) -> Vec<f64> {
    (0..f.rep().group().order() as i64)
        .map(|k| eta.expect(f.effect(k)).re)
        .collect()
}

/// `Σ_k w_k U(k) a U(k)*`.
pub(crate) fn weighted_average(a: &ComplexMatrix, rep_s: &Representation, w: &[f64]) -> ComplexMatrix {
    let d = a.rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (k, &wk) in w.iter().enumerate() {
        if wk == 0.0 {
            continue;
        }
        let u = rep_s.unitary(k as i64);
        out = out.add_mat(&u.matmul(a).matmul(&u.adjoint()).scale_re(wk));
    }
    out
}
