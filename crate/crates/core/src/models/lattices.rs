//! Position measurements on `Z_n` registers.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, WayError};
use crate::obs::{centered_rep, DiscreteObservable, Geometry, Outcome, OutcomeSet, ProbDist};
use crate::qcore::{kron_vec, ComplexMatrix, StateVector};
use crate::scheme::{ConservedPair, Coupling, MeasurementScheme, PointerPvm};

use super::lattice::{gaussian_state, mod_inverse, momentum_basis, momentum_generator};

/// Position PVM on `Z_n`.
pub fn position_pvm(n: usize) -> DiscreteObservable {
    DiscreteObservable::computational(n, Geometry::Cyclic(n))
}

/// `(P_S, P_A)` with the cyclic shift symmetry of period `n`.
pub fn momentum_pair(n: usize) -> ConservedPair {
    let p = momentum_generator(n);
    ConservedPair::cyclic(p.clone(), p, n).expect("self-adjoint generators")
}

/// `U = exp(iλ Q ⊗ P_A)` with `λ = 2π·lam/n`: the permutation
/// `|q, a⟩ ↦ |q, a + lam·q⟩`. Pointer readings are rescaled by `lam⁻¹`.
pub fn make_von_neumann_lattice(n: usize, lam_index: i64, apparatus: StateVector) -> Result<MeasurementScheme> {
    if n < 2 {
        return Err(WayError::OutOfRange(format!("lattice size {n} below 2")));
    }
    let inv = mod_inverse(lam_index, n).ok_or_else(|| {
        WayError::InvalidQuantization(format!("lam_index {lam_index} is not invertible modulo {n}"))
    })?;
    let lam = lam_index.rem_euclid(n as i64) as usize;
    let perm: Vec<usize> = (0..n * n)
        .map(|i| {
            let (q, a) = (i / n, i % n);
            q * n + (a + lam * q) % n
        })
        .collect();
    let relabel = (0..n).map(|a| (a * inv) % n).collect();
    MeasurementScheme::new(
        n,
        n,
        Coupling::Permutation(perm),
        PointerPvm::computational(OutcomeSet::cyclic_positions(n))?,
        apparatus,
        OutcomeSet::cyclic_positions(n),
        relabel,
    )
}

/// Which observable the Ozawa lattice scheme is read against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    /// System `S`; the reference `R` belongs to the apparatus.
    Absolute,
    /// System `S ⊗ R`, target the relative position `q − r`.
    #[default]
    Relative,
}

/// Preparations for the Ozawa lattice: `φ` for `R` in the position basis,
/// `ξ_a` over the pointer variable `u = k_B − k_A` and `ξ_b` over `k_A`.
#[derive(Debug, Clone)]
pub struct OzawaStates {
    pub phi: StateVector,
    pub xi_a: StateVector,
    pub xi_b: StateVector,
}

impl OzawaStates {
    /// Gaussian `φ` and `ξ_a`, uniform `ξ_b`.
    pub fn gaussian(n: usize, phi_width: f64, xi_width: f64) -> Result<Self> {
        Ok(Self {
            phi: gaussian_state(n, phi_width)?,
            xi_a: gaussian_state(n, xi_width)?,
            xi_b: StateVector::uniform(n),
        })
    }

    /// `ψ(k_A, k_B) = ξ_a(k_B − k_A) ξ_b(k_A)`, returned in the position basis.
    pub fn apparatus_ab(&self, n: usize) -> Result<StateVector> {
        let (xa, xb) = (self.xi_a.amplitudes(), self.xi_b.amplitudes());
        let coeffs: Vec<C64> = (0..n * n)
            .map(|i| {
                let (ka, kb) = (i / n, i % n);
                xa[(kb + n - ka) % n] * xb[ka]
            })
            .collect();
        let f = momentum_basis(n);
        StateVector::normalized(f.kron(&f).mul_vec(&coeffs))
    }
}

/// Pointer shift per unit relative displacement, `2·lam mod n`.
pub fn ozawa_step(n: usize, lam_index: i64) -> i64 {
    (2 * lam_index).rem_euclid(n as i64)
}

/// Four `Z_n` registers `S, R, A, B` coupled by
/// `exp(i(2π·lam/n)(Q − Q_R)(Q_A − Q_B))`, pointer `P_B − P_A`.
pub fn make_ozawa_lattice(n: usize, lam_index: i64, reading: Reading, states: &OzawaStates) -> Result<MeasurementScheme> {
    if !(3..=8).contains(&n) {
        return Err(WayError::OutOfRange(format!("Ozawa lattice needs 3 <= n <= 8, got {n}")));
    }
    let s = ozawa_step(n, lam_index);
    if s == 0 {
        return Err(WayError::InvalidQuantization(format!(
            "lam_index {lam_index} gives no pointer shift modulo {n}"
        )));
    }
    for (name, st) in [("phi", &states.phi), ("xi_a", &states.xi_a), ("xi_b", &states.xi_b)] {
        if st.dim() != n {
            return Err(WayError::DimensionMismatch(format!("{name} must have dimension {n}")));
        }
    }
    let theta = 2.0 * PI * lam_index.rem_euclid(n as i64) as f64 / n as f64;
    let ni = n as i64;
    let diag: Vec<C64> = (0..n.pow(4))
        .map(|i| {
            let (q, r, a, b) = (i / n.pow(3), (i / (n * n)) % n, (i / n) % n, i % n);
            let k = ((q as i64 - r as i64) * (a as i64 - b as i64)).rem_euclid(ni);
            C64::from_polar(1.0, theta * k as f64)
        })
        .collect();

    let f = momentum_basis(n);
    let ab_basis = f.kron(&f);
    let ab_partition: Vec<usize> = (0..n * n).map(|c| (c % n + n - c / n) % n).collect();
    let ab_state = states.apparatus_ab(n)?;
    let (sys_dim, basis, partition, app_state) = match reading {
        Reading::Relative => (n * n, ab_basis, ab_partition, ab_state),
        Reading::Absolute => (
            n,
            ComplexMatrix::identity(n).kron(&ab_basis),
            (0..n).flat_map(|_| ab_partition.iter().copied()).collect(),
            StateVector::new(kron_vec(states.phi.amplitudes(), ab_state.amplitudes()))?,
        ),
    };
    let pointer = PointerPvm::new(OutcomeSet::cyclic_positions(n), basis, partition)?;
    let (targets, relabel) = match mod_inverse(s, n) {
        Some(inv) => (OutcomeSet::cyclic_positions(n), (0..n).map(|u| (u * inv) % n).collect()),
        None => {
            let step = centered_rep(s, n) as f64;
            let outs = (0..n)
                .map(|u| Outcome {
                    label: u.to_string(),
                    value: centered_rep(u as i64, n) as f64 / step,
                })
                .collect();
            (OutcomeSet::new(outs, Geometry::Linear)?, (0..n).collect())
        }
    };
    MeasurementScheme::new(
        sys_dim,
        n.pow(4) / sys_dim,
        Coupling::Diagonal(diag),
        pointer,
        app_state,
        targets,
        relabel,
    )
}

/// Total momentum of the registers on each side, conserved as the joint
/// cyclic shift.
pub fn ozawa_conserved(n: usize, reading: Reading) -> ConservedPair {
    let p = momentum_generator(n);
    let id = ComplexMatrix::identity(n);
    let pair_sum = p.kron(&id).add_mat(&id.kron(&p));
    let (l_sys, l_app) = match reading {
        Reading::Relative => (pair_sum.clone(), pair_sum),
        Reading::Absolute => (p.clone(), p.kron(&ComplexMatrix::identity(n * n)).add_mat(&id.kron(&pair_sum))),
    };
    ConservedPair::cyclic(l_sys, l_app, n).expect("self-adjoint generators")
}

/// The sharp observable each reading approximates.
pub fn ozawa_target(n: usize, reading: Reading) -> DiscreteObservable {
    match reading {
        Reading::Absolute => position_pvm(n),
        Reading::Relative => relative_position_pvm(n),
    }
}

/// `Π_Δ = Σ_{q − r ≡ Δ} |q, r⟩⟨q, r|` on `Z_n ⊗ Z_n`.
pub fn relative_position_pvm(n: usize) -> DiscreteObservable {
    let effects = (0..n)
        .map(|delta| {
            let d: Vec<f64> = (0..n * n)
                .map(|i| if (i / n + n - i % n) % n == delta { 1.0 } else { 0.0 })
                .collect();
            ComplexMatrix::from_real_diag(&d)
        })
        .collect();
    DiscreteObservable::new_unchecked(OutcomeSet::cyclic_positions(n), effects).expect("square effects")
}

/// Confidence kernel predicted for an invertible step `s`:
/// `κ(j) = |ξ_a(s·j)|²` for the relative reading and `|φ(−·)|² ∗ κ` for the
/// absolute one.
pub fn ozawa_kernel(n: usize, lam_index: i64, reading: Reading, states: &OzawaStates) -> Result<ProbDist> {
    let s = ozawa_step(n, lam_index);
    if mod_inverse(s, n).is_none() {
        return Err(WayError::InvalidQuantization(format!("step {s} is not invertible modulo {n}")));
    }
    let xa = states.xi_a.amplitudes();
    let outcomes = OutcomeSet::cyclic_positions(n);
    let kappa = ProbDist::new(
        outcomes.clone(),
        (0..n).map(|j| xa[(s as usize * j) % n].norm_sqr()).collect(),
    )?;
    match reading {
        Reading::Relative => Ok(kappa),
        Reading::Absolute => {
            let phi = states.phi.amplitudes();
            let reflected = ProbDist::new(outcomes, (0..n).map(|j| phi[(n - j) % n].norm_sqr()).collect())?;
            reflected.convolve_cyclic(&kappa)
        }
    }
}
