use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{Result, WayError};
use crate::tol;

/// Spectral decomposition of a self-adjoint matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermEig {
    /// `V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| C64::new(x, 0.0))
    }
}

/// Eigen-decomposition of a self-adjoint matrix (ascending eigenvalues).
///
/// Inputs with a self-adjointness residual above the validation tolerance are
/// rejected. The solver itself is nalgebra's Householder/QR symmetric
/// eigensolver applied to the exactly symmetrised input.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermEig> {
    if !a.is_square() {
        return Err(WayError::DimensionMismatch(format!(
            "herm_eig needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    a.ensure_hermitian(tol::validation())?;
    Ok(herm_eig_unchecked(&a.hermitian_part()))
}

pub(crate) fn herm_eig_unchecked(a: &ComplexMatrix) -> HermEig {
    let n = a.rows();
    if n == 1 {
        return HermEig {
            values: vec![a[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        };
    }
    let m = DMatrix::from_row_slice(n, n, a.data());
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    HermEig { values, vectors }
}

/// `exp(i t h)` for self-adjoint `h`, through its spectral decomposition.
pub fn mat_exp_i(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    Ok(eig.apply(|x| C64::from_polar(1.0, t * x)))
}

/// Largest singular value.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    let gram = if a.rows() >= a.cols() {
        a.adjoint().matmul(a)
    } else {
        a.matmul(&a.adjoint())
    };
    let gram = gram.hermitian_part();
    let top = if gram.rows() <= 160 {
        herm_eig_unchecked(&gram).values.last().copied().unwrap_or(0.0)
    } else {
        power_top_eigenvalue(&gram)
    };
    top.max(0.0).sqrt()
}

/// Operator norm of a self-adjoint matrix: `max |λ|`.
pub fn herm_op_norm(a: &ComplexMatrix) -> f64 {
    if a.max_abs() == 0.0 {
        return 0.0;
    }
    if a.rows() > 160 {
        return op_norm(a);
    }
    let vals = herm_eig_unchecked(&a.hermitian_part()).values;
    vals.first()
        .map(|v| v.abs())
        .unwrap_or(0.0)
        .max(vals.last().map(|v| v.abs()).unwrap_or(0.0))
}

/// Top eigenvalue of a positive semidefinite matrix by power iteration.
fn power_top_eigenvalue(g: &ComplexMatrix) -> f64 {
    let n = g.rows();
    // Deterministic start vector with no special alignment to a lattice basis.
    let mut v: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + (i as f64 * 0.618_033_988_75).fract(), (i as f64 * 0.414_213_562).fract()))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let nv = super::matrix::norm(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= nv);
        let w = g.mul_vec(&v);
        let next = super::matrix::inner(&v, &w).re;
        let converged = (next - lambda).abs() <= 1e-15 * next.abs().max(1e-300);
        lambda = next;
        v = w;
        if converged {
            break;
        }
    }
    lambda
}

/// Largest singular value of a linear map given only through its action and
/// the action of its adjoint, by power iteration on `A*A`.
pub fn op_norm_implicit(
    dim: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    apply_adjoint: impl Fn(&[C64]) -> Vec<C64>,
) -> f64 {
    let mut v: Vec<C64> = (0..dim)
        .map(|i| C64::new(1.0 + (i as f64 * 0.618_033_988_75).fract(), (i as f64 * 0.414_213_562).fract()))
        .collect();
    let mut lambda: f64 = 0.0;
    for _ in 0..3000 {
        let nv = super::matrix::norm(&v);
        if nv == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= nv);
        let av = apply(&v);
        let next = av.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let w = apply_adjoint(&av);
        let converged = (next - lambda).abs() <= 1e-14 * next.max(1e-300);
        lambda = next;
        v = w;
        if converged || next == 0.0 {
            break;
        }
    }
    lambda.max(0.0).sqrt()
}

/// Smallest eigenvalue of a self-adjoint matrix.
pub fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    herm_eig_unchecked(&a.hermitian_part()).values[0]
}

/// Positive square root of a positive semidefinite matrix; tiny negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    if let Some(&lo) = eig.values.first() {
        if lo < -tol::validation() {
            return Err(WayError::InvalidObservable(format!(
                "square root of a matrix with eigenvalue {lo:.3e}"
            )));
        }
    }
    Ok(eig.apply(|x| C64::new(x.max(0.0).sqrt(), 0.0)))
}
