use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};
use crate::qcore::{mat_exp_i, ComplexMatrix};
use crate::tol;

/// Generators `(L_S, L_A)` of an additive conserved quantity
/// `L = L_S ⊗ I + I ⊗ L_A`.
///
/// With `period: Some(N)` the generators have integer spectra and only the
/// cyclic symmetry `exp(2πi L / N)` is conserved; every commutator audit is
/// then taken against that unitary instead of `L` itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair", into = "RawPair")]
pub struct ConservedPair {
    l_sys: ComplexMatrix,
    l_app: ComplexMatrix,
    period: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawPair {
    l_sys: ComplexMatrix,
    l_app: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    period: Option<usize>,
}

impl TryFrom<RawPair> for ConservedPair {
    type Error = WayError;

    fn try_from(r: RawPair) -> Result<Self> {
        match r.period {
            None => ConservedPair::new(r.l_sys, r.l_app),
            Some(n) => ConservedPair::cyclic(r.l_sys, r.l_app, n),
        }
    }
}

impl From<ConservedPair> for RawPair {
    fn from(c: ConservedPair) -> Self {
        RawPair {
            l_sys: c.l_sys,
            l_app: c.l_app,
            period: c.period,
        }
    }
}

/// The operator commutators are taken against, split per tensor leg.
#[derive(Debug, Clone)]
pub enum SymmetryOp {
    /// `a ⊗ I + I ⊗ b`
    Sum(ComplexMatrix, ComplexMatrix),
    /// `a ⊗ b`
    Product(ComplexMatrix, ComplexMatrix),
}

impl ConservedPair {
    pub fn new(l_sys: ComplexMatrix, l_app: ComplexMatrix) -> Result<Self> {
        let t = tol::validation();
        l_sys.ensure_hermitian(t)?;
        l_app.ensure_hermitian(t)?;
        Ok(Self {
            l_sys,
            l_app,
            period: None,
        })
    }

    pub fn cyclic(l_sys: ComplexMatrix, l_app: ComplexMatrix, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(WayError::OutOfRange("period must be positive".into()));
        }
        let mut c = Self::new(l_sys, l_app)?;
        c.period = Some(period);
        Ok(c)
    }

    pub fn l_sys(&self) -> &ComplexMatrix {
        &self.l_sys
    }

    pub fn l_app(&self) -> &ComplexMatrix {
        &self.l_app
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    fn leg(&self, l: &ComplexMatrix) -> ComplexMatrix {
        match self.period {
            None => l.clone(),
            Some(n) => mat_exp_i(l, 2.0 * std::f64::consts::PI / n as f64)
                .expect("generators were validated self-adjoint"),
        }
    }

    /// `L_S`, or `exp(2πi L_S/N)` in cyclic mode.
    pub fn system_op(&self) -> ComplexMatrix {
        self.leg(&self.l_sys)
    }

    /// `L_A`, or `exp(2πi L_A/N)` in cyclic mode.
    pub fn apparatus_op(&self) -> ComplexMatrix {
        self.leg(&self.l_app)
    }

    pub fn symmetry_op(&self) -> SymmetryOp {
        match self.period {
            None => SymmetryOp::Sum(self.l_sys.clone(), self.l_app.clone()),
            Some(_) => SymmetryOp::Product(self.system_op(), self.apparatus_op()),
        }
    }

    /// `L_S ⊗ I + I ⊗ L_A` as a dense matrix.
    pub fn total(&self) -> ComplexMatrix {
        let (s, a) = (self.l_sys.rows(), self.l_app.rows());
        self.l_sys
            .kron(&ComplexMatrix::identity(a))
            .add_mat(&ComplexMatrix::identity(s).kron(&self.l_app))
    }
}

impl SymmetryOp {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            SymmetryOp::Sum(a, b) | SymmetryOp::Product(a, b) => (a.rows(), b.rows()),
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        match self {
            SymmetryOp::Sum(a, b) => a
                .kron(&ComplexMatrix::identity(b.rows()))
                .add_mat(&ComplexMatrix::identity(a.rows()).kron(b)),
            SymmetryOp::Product(a, b) => a.kron(b),
        }
    }

    pub fn apply(&self, v: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        match self {
            SymmetryOp::Sum(a, b) => {
                let x = crate::qcore::apply_left_factor(a, b.rows(), v);
                let y = crate::qcore::apply_right_factor(b, a.rows(), v);
                x.iter().zip(&y).map(|(p, q)| p + q).collect()
            }
            SymmetryOp::Product(a, b) => {
                let x = crate::qcore::apply_right_factor(b, a.rows(), v);
                crate::qcore::apply_left_factor(a, b.rows(), &x)
            }
        }
    }

    pub fn apply_adjoint(&self, v: &[num_complex::Complex64]) -> Vec<num_complex::Complex64> {
        match self {
            SymmetryOp::Sum(a, b) => SymmetryOp::Sum(a.adjoint(), b.adjoint()).apply(v),
            SymmetryOp::Product(a, b) => SymmetryOp::Product(a.adjoint(), b.adjoint()).apply(v),
        }
    }
}
