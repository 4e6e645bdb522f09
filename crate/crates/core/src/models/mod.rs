//! Concrete measurement models, registered by family name.

mod lattice;
mod lattices;
mod rotor;
mod simple;

pub use lattice::{
    discrete_gaussian, gaussian_state, mod_inverse, momentum_basis, momentum_generator, momentum_vector,
    position_operator, position_values,
};
pub use lattices::{
    make_ozawa_lattice, make_von_neumann_lattice, momentum_pair, ozawa_conserved, ozawa_kernel, ozawa_step,
    ozawa_target, position_pvm, relative_position_pvm, OzawaStates, Reading,
};
pub use rotor::{make_qubit_rotor, RelativisationSetup};
pub use simple::{clock_observable, fourier_observable, make_lueders, make_swap, spin_values};

use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};
use crate::obs::DiscreteObservable;
use crate::qcore::{ComplexMatrix, StateVector};
use crate::relfr::{relational_scheme, yen_povm};
use crate::scheme::{ConservedPair, MeasurementScheme};

/// Apparatus preparation for the von Neumann lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prep {
    Sharp,
    Uniform,
    Gaussian(f64),
}

/// Basis of the Lüders target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Clock,
    Fourier,
}

/// A model family name plus its parameters; unset parameters take the
/// family defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelDescriptor {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lam_index: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reading: Option<Reading>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Basis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prep: Option<Prep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi_width: Option<f64>,
}

impl ModelDescriptor {
    pub fn new(family: &str) -> Self {
        Self {
            family: family.to_string(),
            ..Self::default()
        }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_lam_index(mut self, lam: i64) -> Self {
        self.lam_index = Some(lam);
        self
    }
}

/// A built scheme with the conserved pair and target it is audited against.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub scheme: MeasurementScheme,
    pub conserved: Option<ConservedPair>,
    pub target: Option<DiscreteObservable>,
}

pub trait ModelFamily: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn build(&self, d: &ModelDescriptor) -> Result<ModelInstance>;

    /// Reference-frame data for error-versus-spread sweeps, if the family
    /// has any.
    fn relativisation(&self, _d: &ModelDescriptor) -> Option<Result<RelativisationSetup>> {
        None
    }
}

struct Swap;
struct Lueders;
struct VonNeumannLattice;
struct OzawaLattice;
struct QubitRotor;

impl ModelFamily for Swap {
    fn name(&self) -> &'static str {
        "swap"
    }

    fn summary(&self) -> &'static str {
        "SWAP coupling, Fourier pointer, conserved clock charge on both sides"
    }

    fn build(&self, d: &ModelDescriptor) -> Result<ModelInstance> {
        let n = d.n.unwrap_or(2);
        if n < 2 {
            return Err(WayError::OutOfRange("swap needs n >= 2".into()));
        }
        let pointer = fourier_observable(n);
        let l = ComplexMatrix::from_real_diag(&spin_values(n));
        Ok(ModelInstance {
            scheme: make_swap(n, &pointer)?,
            conserved: Some(ConservedPair::new(l.clone(), l)?),
            target: Some(pointer),
        })
    }
}

impl ModelFamily for Lueders {
    fn name(&self) -> &'static str {
        "lueders"
    }

    fn summary(&self) -> &'static str {
        "Lüders scheme for the clock (default) or Fourier PVM, L_S = clock charge, L_A = 0"
    }

    fn build(&self, d: &ModelDescriptor) -> Result<ModelInstance> {
        let n = d.n.unwrap_or(2);
        if n < 1 {
            return Err(WayError::OutOfRange("lueders needs n >= 1".into()));
        }
        let pvm = match d.basis.unwrap_or(Basis::Clock) {
            Basis::Clock => clock_observable(n),
            Basis::Fourier => fourier_observable(n),
        };
        let l = ComplexMatrix::from_real_diag(&spin_values(n));
        Ok(ModelInstance {
            scheme: make_lueders(&pvm)?,
            conserved: Some(ConservedPair::new(l, ComplexMatrix::zeros(n, n))?),
            target: Some(pvm),
        })
    }
}

impl ModelFamily for VonNeumannLattice {
    fn name(&self) -> &'static str {
        "von_neumann_lattice"
    }

    fn summary(&self) -> &'static str {
        "exp(iλ Q⊗P_A) on Z_n x Z_n; does not conserve total momentum"
    }

    fn build(&self, d: &ModelDescriptor) -> Result<ModelInstance> {
        let n = d.n.unwrap_or(5);
        if n < 2 {
            return Err(WayError::OutOfRange("von_neumann_lattice needs n >= 2".into()));
        }
        let prep = match d.prep.unwrap_or(Prep::Sharp) {
            Prep::Sharp => StateVector::basis(n, 0),
            Prep::Uniform => StateVector::uniform(n),
            Prep::Gaussian(w) => gaussian_state(n, w)?,
        };
        Ok(ModelInstance {
            scheme: make_von_neumann_lattice(n, d.lam_index.unwrap_or(1), prep)?,
            conserved: Some(momentum_pair(n)),
            target: Some(position_pvm(n)),
        })
    }
}

impl ModelFamily for OzawaLattice {
    fn name(&self) -> &'static str {
        "ozawa_lattice"
    }

    fn summary(&self) -> &'static str {
        "four Z_n registers, momentum-conserving position measurement; relative or absolute reading"
    }

    fn build(&self, d: &ModelDescriptor) -> Result<ModelInstance> {
        let n = d.n.unwrap_or(5);
        let reading = d.reading.unwrap_or_default();
        let states = OzawaStates::gaussian(n, d.phi_width.unwrap_or(0.7), d.xi_width.unwrap_or(0.6))?;
        let scheme = make_ozawa_lattice(n, d.lam_index.unwrap_or(3), reading, &states)?;
        let target = mod_inverse(ozawa_step(n, d.lam_index.unwrap_or(3)), n).map(|_| ozawa_target(n, reading));
        Ok(ModelInstance {
            scheme,
            conserved: Some(ozawa_conserved(n, reading)),
            target,
        })
    }
}

impl ModelFamily for QubitRotor {
    fn name(&self) -> &'static str {
        "qubit_rotor"
    }

    fn summary(&self) -> &'static str {
        "qubit relative to an n-level rotor; square-root scheme for the relativised σ_x"
    }

    fn build(&self, d: &ModelDescriptor) -> Result<ModelInstance> {
        let setup = make_qubit_rotor(d.n.unwrap_or(8))?;
        let e = yen_povm(&setup.target, &setup.rep_s, &setup.reference)?;
        Ok(ModelInstance {
            scheme: relational_scheme(&e)?,
            conserved: None,
            target: Some(e),
        })
    }

    fn relativisation(&self, d: &ModelDescriptor) -> Option<Result<RelativisationSetup>> {
        Some(make_qubit_rotor(d.n.unwrap_or(8)))
    }
}

static FAMILIES: [&dyn ModelFamily; 5] = [&Swap, &Lueders, &VonNeumannLattice, &OzawaLattice, &QubitRotor];

pub fn registry() -> &'static [&'static dyn ModelFamily] {
    &FAMILIES
}

/// Finds a family by name; `-` and `_` are interchangeable.
pub fn lookup(name: &str) -> Result<&'static dyn ModelFamily> {
    let key = name.trim().replace('-', "_");
    FAMILIES
        .iter()
        .copied()
        .find(|f| f.name() == key)
        .ok_or_else(|| WayError::UnknownFamily(name.to_string()))
}

pub fn build(d: &ModelDescriptor) -> Result<ModelInstance> {
    lookup(&d.family)?.build(d)
}

#[cfg(test)]
mod tests;
