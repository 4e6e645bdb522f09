use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};
use crate::qcore::random::complete_unitary;
use crate::qcore::{psd_sqrt, ComplexMatrix};

/// Unitary coupling on `system ⊗ apparatus`.
///
/// Lattice models whose interaction is diagonal in a product basis keep only
/// the diagonal, so that schemes with a few thousand dimensions never
/// materialise a dense unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    Dense(ComplexMatrix),
    #[serde(with = "pairs")]
    Diagonal(Vec<C64>),
    /// Basis permutation `e_i ↦ e_{perm[i]}`.
    Permutation(Vec<usize>),
}

mod pairs {
    use num_complex::Complex64 as C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl Coupling {
    pub fn identity(dim: usize) -> Self {
        Coupling::Diagonal(vec![C64::new(1.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        match self {
            Coupling::Dense(m) => m.rows(),
            Coupling::Diagonal(d) => d.len(),
            Coupling::Permutation(p) => p.len(),
        }
    }

    /// Largest entry of `U*U - I`.
    pub fn unitary_residual(&self) -> f64 {
        match self {
            Coupling::Dense(m) => m.unitary_residual(),
            Coupling::Diagonal(d) => d.iter().map(|z| (z.norm_sqr() - 1.0).abs()).fold(0.0, f64::max),
            Coupling::Permutation(_) => 0.0,
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if let Coupling::Dense(m) = self {
            if !m.is_square() {
                return Err(WayError::DimensionMismatch("coupling must be square".into()));
            }
        }
        if let Coupling::Diagonal(d) = self {
            if d.is_empty() || d.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(WayError::InvalidScheme("diagonal coupling has non-finite entries".into()));
            }
        }
        if let Coupling::Permutation(p) = self {
            let mut seen = vec![false; p.len()];
            for &j in p {
                if j >= p.len() || std::mem::replace(&mut seen[j], true) {
                    return Err(WayError::InvalidScheme("permutation coupling is not a bijection".into()));
                }
            }
        }
        let residual = self.unitary_residual();
        if residual > tol {
            return Err(WayError::NotUnitary { residual });
        }
        Ok(())
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        match self {
            Coupling::Dense(m) => m.clone(),
            Coupling::Diagonal(d) => ComplexMatrix::from_diag(d),
            Coupling::Permutation(p) => {
                let mut m = ComplexMatrix::zeros(p.len(), p.len());
                for (i, &j) in p.iter().enumerate() {
                    m[(j, i)] = C64::new(1.0, 0.0);
                }
                m
            }
        }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        match self {
            Coupling::Dense(m) => m.mul_vec(v),
            Coupling::Diagonal(d) => d.iter().zip(v).map(|(a, b)| a * b).collect(),
            Coupling::Permutation(p) => {
                let mut out = vec![C64::new(0.0, 0.0); v.len()];
                for (i, &j) in p.iter().enumerate() {
                    out[j] = v[i];
                }
                out
            }
        }
    }

    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        match self {
            Coupling::Dense(m) => {
                let n = m.rows();
                (0..n)
                    .map(|j| (0..n).map(|i| m[(i, j)].conj() * v[i]).sum())
                    .collect()
            }
            Coupling::Diagonal(d) => d.iter().zip(v).map(|(a, b)| a.conj() * b).collect(),
            Coupling::Permutation(p) => p.iter().map(|&j| v[j]).collect(),
        }
    }

    /// `U* X U`.
    pub fn conjugate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Coupling::Dense(u) => u.adjoint().matmul(&x.matmul(u)),
            Coupling::Diagonal(d) => {
                ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| d[i].conj() * x[(i, j)] * d[j])
            }
            Coupling::Permutation(p) => ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| x[(p[i], p[j])]),
        }
    }

    /// `U X - X U` as a dense matrix.
    pub fn commutator_with(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Coupling::Dense(u) => u.matmul(x).sub_mat(&x.matmul(u)),
            Coupling::Diagonal(d) => ComplexMatrix::from_fn(x.rows(), x.cols(), |i, j| (d[i] - d[j]) * x[(i, j)]),
            Coupling::Permutation(_) => {
                let u = self.to_dense();
                u.matmul(x).sub_mat(&x.matmul(&u))
            }
        }
    }
}

/// Unitary extending `ψ ⊗ e_0 ↦ Σ_x √E(x) ψ ⊗ e_x` on `C^d ⊗ C^k`, with the
/// remaining columns filled by Gram-Schmidt over the standard basis.
pub fn square_root_coupling(effects: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let k = effects.len();
    let d = effects.first().map(|e| e.rows()).unwrap_or(0);
    let total = d * k;
    let roots = effects.iter().map(psd_sqrt).collect::<Result<Vec<_>>>()?;
    let fixed: Vec<(usize, Vec<C64>)> = (0..d)
        .map(|i| {
            let mut col = vec![C64::new(0.0, 0.0); total];
            for (x, r) in roots.iter().enumerate() {
                for j in 0..d {
                    col[j * k + x] = r[(j, i)];
                }
            }
            (i * k, col)
        })
        .collect();
    complete_unitary(total, &fixed)
        .ok_or_else(|| WayError::InvalidObservable("square-root isometry could not be completed".into()))
}
