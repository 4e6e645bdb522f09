//! `Z_n` position/momentum conventions shared by the lattice models.
//!
//! Momentum eigenvectors are `|k̃⟩ = n^{-1/2} Σ_a e^{-2πika/n} |a⟩` with
//! integer eigenvalue `k`, so that `exp(2πi P/n)|a⟩ = |a + 1⟩`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{Result, WayError};
use crate::obs::centered_rep;
use crate::qcore::{ComplexMatrix, StateVector};

/// Position values: representatives in `(-n/2, n/2]`.
pub fn position_values(n: usize) -> Vec<f64> {
    (0..n).map(|a| centered_rep(a as i64, n) as f64).collect()
}

pub fn position_operator(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&position_values(n))
}

pub fn momentum_vector(n: usize, k: usize) -> Vec<C64> {
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|a| C64::from_polar(s, -2.0 * PI * ((k * a) % n) as f64 / n as f64))
        .collect()
}

/// Unitary whose column `k` is `|k̃⟩`.
pub fn momentum_basis(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_columns(&(0..n).map(|k| momentum_vector(n, k)).collect::<Vec<_>>())
}

/// Shift generator `P` with spectrum `0..n`.
pub fn momentum_generator(n: usize) -> ComplexMatrix {
    let f = momentum_basis(n);
    let d: Vec<f64> = (0..n).map(|k| k as f64).collect();
    f.matmul(&ComplexMatrix::from_real_diag(&d)).matmul(&f.adjoint())
}

/// Amplitudes `∝ exp(-x²/(4σ²))` over centred positions, so `|ψ|²` has
/// standard deviation close to `σ` away from wraparound. `σ = 0` gives the
/// position eigenstate at 0.
pub fn discrete_gaussian(n: usize, sigma: f64) -> Result<Vec<f64>> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(WayError::OutOfRange(format!("width {sigma} must be finite and nonnegative")));
    }
    if sigma == 0.0 {
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        return Ok(v);
    }
    let raw: Vec<f64> = position_values(n)
        .iter()
        .map(|x| (-x * x / (4.0 * sigma * sigma)).exp())
        .collect();
    let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(raw.into_iter().map(|x| x / norm).collect())
}

pub fn gaussian_state(n: usize, sigma: f64) -> Result<StateVector> {
    StateVector::from_real(&discrete_gaussian(n, sigma)?)
}

/// Multiplicative inverse of `a` modulo `n`, if any.
pub fn mod_inverse(a: i64, n: usize) -> Option<usize> {
    let n = n as i64;
    let (mut r0, mut r1) = (a.rem_euclid(n), n);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1 || n == 1).then(|| s0.rem_euclid(n) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::mat_exp_i;

    #[test]
    fn momentum_generator_shifts_by_one() {
        for n in [2, 3, 5, 8] {
            let u = mat_exp_i(&momentum_generator(n), 2.0 * PI / n as f64).unwrap();
            for a in 0..n {
                for b in 0..n {
                    let expect = if b == (a + 1) % n { 1.0 } else { 0.0 };
                    assert!((u[(b, a)] - C64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
            assert!(momentum_basis(n).unitary_residual() < 1e-12);
        }
    }

    #[test]
    fn inverses() {
        assert_eq!(mod_inverse(3, 5), Some(2));
        assert_eq!(mod_inverse(6, 5), Some(1));
        assert_eq!(mod_inverse(2, 8), None);
        assert_eq!(mod_inverse(-1, 7), Some(6));
    }

    #[test]
    fn gaussian_is_normalised_and_centred() {
        let g = discrete_gaussian(9, 1.2).unwrap();
        assert!((g.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((g[1] - g[8]).abs() < 1e-15);
        assert_eq!(discrete_gaussian(4, 0.0).unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
    }
}
