use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::eig::min_eigenvalue;
use super::matrix::{norm, ComplexMatrix};
use crate::error::{Result, WayError};
use crate::tol;

/// Unit vector in `C^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl TryFrom<Vec<[f64; 2]>> for StateVector {
    type Error = WayError;

    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self> {
        StateVector::new(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl From<StateVector> for Vec<[f64; 2]> {
    fn from(s: StateVector) -> Self {
        s.amplitudes.iter().map(|z| [z.re, z.im]).collect()
    }
}

impl StateVector {
    /// Validates that the amplitudes already have unit norm.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(WayError::InvalidState("empty state vector".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(WayError::InvalidState("non-finite amplitude".into()));
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > tol::construction() {
            return Err(WayError::InvalidState(format!(
                "norm is {n}, expected 1"
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; fails for the zero vector.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(WayError::InvalidState("cannot normalise a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|z| z / n).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut amplitudes = vec![C64::new(0.0, 0.0); dim];
        amplitudes[k] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn uniform(dim: usize) -> Self {
        let a = C64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            amplitudes: vec![a; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            matrix: self.projector(),
        }
    }

    /// `<ψ|A|ψ>`.
    pub fn expect(&self, a: &ComplexMatrix) -> C64 {
        a.sandwich(&self.amplitudes, &self.amplitudes)
    }

    /// `<ψ|A²|ψ> - <ψ|A|ψ>²` for self-adjoint `A`.
    pub fn variance(&self, a: &ComplexMatrix) -> f64 {
        let av = a.mul_vec(&self.amplitudes);
        let mean = super::matrix::inner(&self.amplitudes, &av).re;
        let second = av.iter().map(|z| z.norm_sqr()).sum::<f64>();
        (second - mean * mean).max(0.0)
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            amplitudes: super::matrix::kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

/// Positive, unit-trace, self-adjoint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(WayError::DimensionMismatch("density operator must be square".into()));
        }
        let t = tol::construction();
        let herm = matrix.hermitian_residual();
        if herm > t {
            return Err(WayError::InvalidState(format!(
                "density operator not self-adjoint (residual {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > t || tr.im.abs() > t {
            return Err(WayError::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let lo = min_eigenvalue(&matrix);
        if lo < -t {
            return Err(WayError::InvalidState(format!(
                "density operator has eigenvalue {lo:.3e}"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_re(1.0 / dim as f64),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator {
            matrix: self.matrix.kron(&other.matrix),
        }
    }

    /// `tr[ρA]`.
    pub fn expect(&self, a: &ComplexMatrix) -> C64 {
        let n = self.dim();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.matrix[(i, j)] * a[(j, i)];
            }
        }
        s
    }
}

/// Ordered tensor factors `H_0 ⊗ H_1 ⊗ ...`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeSpace {
    factor_dims: Vec<usize>,
}

impl CompositeSpace {
    pub fn new(factor_dims: Vec<usize>) -> Result<Self> {
        if factor_dims.is_empty() || factor_dims.contains(&0) {
            return Err(WayError::DimensionMismatch(format!(
                "factor dims must be positive, got {factor_dims:?}"
            )));
        }
        Ok(Self { factor_dims })
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }
}

/// Reduced state on leg `keep`.
pub fn partial_trace(rho: &DensityOperator, space: &CompositeSpace, keep: usize) -> Result<DensityOperator> {
    let matrix = partial_trace_matrix(rho.matrix(), space, keep)?;
    Ok(DensityOperator { matrix })
}

/// Partial trace of an arbitrary operator over every leg except `keep`.
pub fn partial_trace_matrix(m: &ComplexMatrix, space: &CompositeSpace, keep: usize) -> Result<ComplexMatrix> {
    let dims = space.factor_dims();
    if keep >= dims.len() {
        return Err(WayError::DimensionMismatch(format!(
            "leg {keep} out of range for {} factors",
            dims.len()
        )));
    }
    if !m.is_square() || m.rows() != space.total_dim() {
        return Err(WayError::DimensionMismatch(format!(
            "operator of dim {} on a space of dim {}",
            m.rows(),
            space.total_dim()
        )));
    }
    let before: usize = dims[..keep].iter().product();
    let k = dims[keep];
    let after: usize = dims[keep + 1..].iter().product();
    let mut out = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut s = C64::new(0.0, 0.0);
            for b in 0..before {
                for a in 0..after {
                    let r = (b * k + i) * after + a;
                    let c = (b * k + j) * after + a;
                    s += m[(r, c)];
                }
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit_state(p: f64, coh: C64) -> DensityOperator {
        DensityOperator::new(ComplexMatrix::from_rows(&[
            vec![C64::new(p, 0.0), coh],
            vec![coh.conj(), C64::new(1.0 - p, 0.0)],
        ]))
        .unwrap()
    }

    #[test]
    fn product_state_factorises() {
        let rho = qubit_state(0.7, C64::new(0.1, 0.2));
        let sigma = qubit_state(0.4, C64::new(-0.3, 0.05));
        let joint = rho.tensor(&sigma);
        let space = CompositeSpace::new(vec![2, 2]).unwrap();
        let r0 = partial_trace(&joint, &space, 0).unwrap();
        let r1 = partial_trace(&joint, &space, 1).unwrap();
        assert!(r0.matrix().sub_mat(rho.matrix()).max_abs() < 1e-15);
        assert!(r1.matrix().sub_mat(sigma.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn bell_state_marginals_are_maximally_mixed() {
        let bell = StateVector::from_real(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        let space = CompositeSpace::new(vec![2, 2]).unwrap();
        for leg in 0..2 {
            let red = partial_trace(&bell.density(), &space, leg).unwrap();
            let half = DensityOperator::maximally_mixed(2);
            assert!(red.matrix().sub_mat(half.matrix()).max_abs() < 1e-15);
        }
    }

    #[test]
    fn middle_leg_of_three() {
        let a = StateVector::basis(2, 1).density();
        let b = qubit_state(0.25, C64::new(0.0, 0.1));
        let c = DensityOperator::maximally_mixed(3);
        let joint = a.tensor(&b).tensor(&c);
        let space = CompositeSpace::new(vec![2, 2, 3]).unwrap();
        let mid = partial_trace(&joint, &space, 1).unwrap();
        assert!(mid.matrix().sub_mat(b.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let rho = DensityOperator::maximally_mixed(4);
        let space = CompositeSpace::new(vec![2, 3]).unwrap();
        assert!(partial_trace(&rho, &space, 0).is_err());
        let ok_space = CompositeSpace::new(vec![2, 2]).unwrap();
        assert!(partial_trace(&rho, &ok_space, 2).is_err());
    }

    #[test]
    fn state_vector_validation() {
        assert!(StateVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
        assert!(StateVector::normalized(vec![C64::new(0.0, 0.0)]).is_err());
        let s = StateVector::from_real(&[3.0, 4.0]).unwrap();
        assert!((s.amplitudes()[0].re - 0.6).abs() < 1e-15);
    }

    #[test]
    fn density_validation() {
        let bad = ComplexMatrix::from_real_diag(&[1.5, -0.5]);
        assert!(DensityOperator::new(bad).is_err());
        let bad_trace = ComplexMatrix::from_real_diag(&[0.5, 0.4]);
        assert!(DensityOperator::new(bad_trace).is_err());
    }
}
