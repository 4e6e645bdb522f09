use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::obs::{smear_cyclic, spectral_pvm, OutcomeSet, ProbDist, DEFAULT_MERGE_TOL};
use crate::qcore::random::random_hermitian;
use crate::qcore::{mat_exp_i, pauli};
use crate::scheme::restrict;

fn dense_measured(m: &MeasurementScheme) -> Vec<ComplexMatrix> {
    let d = m.total_dim();
    let sigma = m.apparatus_state().density();
    let mut sums = vec![ComplexMatrix::zeros(d, d); m.targets().len()];
    for (x, l) in m.pointer().outcomes().labels().enumerate() {
        let t = m.relabel()[x];
        sums[t] = sums[t].add_mat(&m.heisenberg_pointer(l).unwrap());
    }
    sums.iter().map(|s| restrict(s, &sigma).unwrap()).collect()
}

fn max_effect_gap(a: &[ComplexMatrix], b: &[ComplexMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.sub_mat(y).max_abs()).fold(0.0, f64::max)
}

#[test]
fn spin_observables_are_paulis() {
    let sx = spectral_pvm(&pauli::x(), DEFAULT_MERGE_TOL).unwrap();
    let sz = spectral_pvm(&pauli::z(), DEFAULT_MERGE_TOL).unwrap();
    assert!(max_effect_gap(fourier_observable(2).effects(), sx.effects()) < 1e-15);
    assert!(max_effect_gap(clock_observable(2).effects(), sz.effects()) < 1e-15);
    assert!(fourier_observable(2).first_moment().sub_mat(&pauli::x()).max_abs() < 1e-15);
}

#[test]
fn swap_family() {
    let inst = build(&ModelDescriptor::new("swap")).unwrap();
    let target = inst.target.unwrap();
    let pair = inst.conserved.unwrap();
    assert!(inst.scheme.prc_defect(&target).unwrap() < 1e-12);
    assert!((inst.scheme.yanase_defect(&pair).unwrap() - 2.0).abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in [2, 3] {
        let l = random_hermitian(&mut rng, d);
        let m = make_swap(d, &fourier_observable(d)).unwrap();
        let shared = ConservedPair::new(l.clone(), l).unwrap();
        assert!(m.conservation_defect(&shared).unwrap() < 1e-12);
        assert!(m.prc_defect(&fourier_observable(d)).unwrap() < 1e-12);
    }
    assert!(make_swap(3, &fourier_observable(2)).is_err());
}

#[test]
fn lueders_family() {
    let m = make_lueders(&clock_observable(2)).unwrap();
    assert!(m.coupling().to_dense().sub_mat(&pauli::cnot()).max_abs() < 1e-12);
    assert!(m.prc_defect(&clock_observable(2)).unwrap() < 1e-12);
    assert!(m.repeatability_defect() < 1e-12);

    let single = DiscreteObservable::new(
        OutcomeSet::from_values(&[0.0], crate::obs::Geometry::Linear).unwrap(),
        vec![ComplexMatrix::identity(3)],
    )
    .unwrap();
    let t = make_lueders(&single).unwrap();
    assert!(t.coupling().to_dense().sub_mat(&ComplexMatrix::identity(3)).max_abs() < 1e-14);

    let fx = build(&ModelDescriptor {
        basis: Some(Basis::Fourier),
        ..ModelDescriptor::new("lueders")
    })
    .unwrap();
    assert!(fx.scheme.conservation_defect(fx.conserved.as_ref().unwrap()).unwrap() > 0.1);

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let pvm = spectral_pvm(&random_hermitian(&mut rng, 3), DEFAULT_MERGE_TOL).unwrap();
    let m3 = make_lueders(&pvm).unwrap();
    assert!(max_effect_gap(m3.measured_observable().effects(), pvm.effects()) < 1e-12);
    assert!(m3.repeatability_defect() < 1e-12);
    let unsharp = DiscreteObservable::trivial(OutcomeSet::cyclic_positions(2), &[0.5, 0.5], 2).unwrap();
    assert!(make_lueders(&unsharp).is_err());
}

#[test]
fn von_neumann_permutation_is_the_exponential() {
    for (n, lam) in [(5usize, 2i64), (4, 3), (6, 1)] {
        let m = make_von_neumann_lattice(n, lam, StateVector::basis(n, 0)).unwrap();
        let h = position_operator(n).kron(&momentum_generator(n));
        let u = mat_exp_i(&h, 2.0 * std::f64::consts::PI * lam as f64 / n as f64).unwrap();
        assert!(m.coupling().to_dense().sub_mat(&u).max_abs() < 1e-10);
    }
}

#[test]
fn von_neumann_lattice_readings() {
    let n = 5;
    let sharp = make_von_neumann_lattice(n, 2, StateVector::basis(n, 0)).unwrap();
    assert!(sharp.prc_defect(&position_pvm(n)).unwrap() < 1e-12);
    let flat = make_von_neumann_lattice(n, 2, StateVector::uniform(n)).unwrap();
    for e in flat.measured_observable().effects() {
        assert!(e.sub_mat(&ComplexMatrix::identity(n).scale_re(1.0 / n as f64)).max_abs() < 1e-12);
    }
    assert!(sharp.conservation_defect(&momentum_pair(n)).unwrap() > 0.1);
    assert!(matches!(
        make_von_neumann_lattice(4, 2, StateVector::basis(4, 0)),
        Err(WayError::InvalidQuantization(_))
    ));
    assert!(make_von_neumann_lattice(5, 0, StateVector::basis(5, 0)).is_err());
}

fn asymmetric_states(n: usize) -> OzawaStates {
    let phi: Vec<f64> = (0..n).map(|j| [0.8, 0.5, 0.2, 0.1, 0.3, 0.05, 0.1, 0.2][j]).collect();
    let xa: Vec<C64> = (0..n).map(|j| C64::new([0.9, 0.3, 0.1, 0.05, 0.2, 0.1, 0.0, 0.1][j], 0.1 * j as f64)).collect();
    OzawaStates {
        phi: StateVector::normalized(phi.into_iter().map(C64::from).collect()).unwrap(),
        xi_a: StateVector::normalized(xa).unwrap(),
        xi_b: StateVector::normalized((0..n).map(|j| C64::from_polar(1.0, j as f64)).collect()).unwrap(),
    }
}

#[test]
fn ozawa_relative_reading_matches_kernel_and_dense_oracle() {
    let n = 5;
    let states = asymmetric_states(n);
    let m = make_ozawa_lattice(n, 3, Reading::Relative, &states).unwrap();
    let fast = m.measured_observable();
    let dense = dense_measured(&m);
    assert!(max_effect_gap(fast.effects(), &dense) < 1e-10);
    // s = 6 ≡ 1 (mod 5): the kernel is |ξ_a|² itself
    let kappa: Vec<f64> = states.xi_a.amplitudes().iter().map(|z| z.norm_sqr()).collect();
    let kernel = ProbDist::new(OutcomeSet::cyclic_positions(n), kappa).unwrap();
    let predicted = smear_cyclic(&relative_position_pvm(n), &kernel).unwrap();
    assert!(max_effect_gap(fast.effects(), predicted.effects()) < 1e-10);
    assert!(max_effect_gap(
        fast.effects(),
        smear_cyclic(&relative_position_pvm(n), &ozawa_kernel(n, 3, Reading::Relative, &states).unwrap())
            .unwrap()
            .effects()
    ) < 1e-10);
}

#[test]
fn ozawa_absolute_reading_reflects_phi() {
    let n = 5;
    let states = asymmetric_states(n);
    let m = make_ozawa_lattice(n, 3, Reading::Absolute, &states).unwrap();
    let fast = m.measured_observable();
    assert!(max_effect_gap(fast.effects(), &dense_measured(&m)) < 1e-10);
    // brute force: reading y given system q is Δ + j with Δ = q − r, j ~ κ
    let phi2: Vec<f64> = states.phi.amplitudes().iter().map(|z| z.norm_sqr()).collect();
    let kappa: Vec<f64> = states.xi_a.amplitudes().iter().map(|z| z.norm_sqr()).collect();
    for q in 0..n {
        let mut p = vec![0.0; n];
        for r in 0..n {
            for j in 0..n {
                p[(q + n - r + j) % n] += phi2[r] * kappa[j];
            }
        }
        for (y, e) in fast.effects().iter().enumerate() {
            assert!((e[(q, q)].re - p[y]).abs() < 1e-12);
        }
    }
    let kernel = ozawa_kernel(n, 3, Reading::Absolute, &states).unwrap();
    let predicted = smear_cyclic(&position_pvm(n), &kernel).unwrap();
    assert!(max_effect_gap(fast.effects(), predicted.effects()) < 1e-10);
}

#[test]
fn ozawa_xi_b_plays_no_role() {
    let n = 4;
    let mut states = OzawaStates::gaussian(n, 0.7, 0.6).unwrap();
    let a = make_ozawa_lattice(n, 1, Reading::Relative, &states).unwrap().measured_observable();
    states.xi_b = StateVector::basis(n, 2);
    let b = make_ozawa_lattice(n, 1, Reading::Relative, &states).unwrap().measured_observable();
    assert!(max_effect_gap(a.effects(), b.effects()) < 1e-10);
}

#[test]
fn ozawa_conserves_total_shift_and_von_neumann_does_not() {
    let n = 5;
    for reading in [Reading::Relative, Reading::Absolute] {
        let inst = build(&ModelDescriptor {
            reading: Some(reading),
            ..ModelDescriptor::new("ozawa-lattice").with_n(n)
        })
        .unwrap();
        assert!(inst.scheme.conservation_defect(inst.conserved.as_ref().unwrap()).unwrap() < 1e-10);
    }
    let vn = build(&ModelDescriptor::new("von-neumann-lattice").with_n(n)).unwrap();
    assert!(vn.scheme.conservation_defect(vn.conserved.as_ref().unwrap()).unwrap() > 0.1);
}

#[test]
fn ozawa_even_lattice_scaled_reading_variance() {
    // n = 8, lam = 1: step 2 is not invertible, readings are u/2
    let n = 8;
    let phi = [0.0, 0.6, 0.0, 0.0, 0.0, 0.0, 0.0, 0.8];
    let xa = [0.7, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5];
    let states = OzawaStates {
        phi: StateVector::from_real(&phi).unwrap(),
        xi_a: StateVector::normalized(xa.iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap(),
        xi_b: StateVector::uniform(n),
    };
    let m = make_ozawa_lattice(n, 1, Reading::Absolute, &states).unwrap();
    let e = m.measured_observable();
    let values = m.targets().values();
    let w: Vec<f64> = e.effects().iter().map(|x| x[(0, 0)].re).collect();
    let mean: f64 = w.iter().zip(&values).map(|(p, v)| p * v).sum();
    let var: f64 = w.iter().zip(&values).map(|(p, v)| p * (v - mean).powi(2)).sum();
    let positions = position_values(n);
    let moments = |amps: &[f64]| {
        let t: f64 = amps.iter().map(|a| a * a).sum();
        let mu: f64 = amps.iter().zip(&positions).map(|(a, x)| a * a * x).sum::<f64>() / t;
        amps.iter().zip(&positions).map(|(a, x)| a * a * (x - mu).powi(2)).sum::<f64>() / t
    };
    let expect = moments(&phi) + moments(&xa) / 4.0;
    assert!((var - expect).abs() < 1e-10, "{var} vs {expect}");
}

#[test]
fn ozawa_parameter_errors() {
    let states = OzawaStates::gaussian(9, 0.5, 0.5).unwrap();
    assert!(matches!(
        make_ozawa_lattice(9, 1, Reading::Relative, &states),
        Err(WayError::OutOfRange(_))
    ));
    let states = OzawaStates::gaussian(4, 0.5, 0.5).unwrap();
    assert!(matches!(
        make_ozawa_lattice(4, 2, Reading::Relative, &states),
        Err(WayError::InvalidQuantization(_))
    ));
}

#[test]
fn qubit_rotor_is_covariant() {
    for n in [2, 5, 8] {
        let setup = make_qubit_rotor(n).unwrap();
        assert!(setup.reference.covariance_defect() < 1e-10);
    }
}

#[test]
fn registry_lookup_and_defaults() {
    assert_eq!(registry().len(), 5);
    for f in registry() {
        let inst = f.build(&ModelDescriptor::new(f.name())).unwrap();
        if let Some(t) = &inst.target {
            assert!(inst.scheme.prc_defect(t).is_ok());
        }
    }
    assert_eq!(lookup("qubit-rotor").unwrap().name(), "qubit_rotor");
    assert!(matches!(lookup("wigner"), Err(WayError::UnknownFamily(_))));
    assert!(lookup("swap").unwrap().relativisation(&ModelDescriptor::new("swap")).is_none());
    let json = serde_json::to_string(&ModelDescriptor::new("ozawa_lattice").with_n(6)).unwrap();
    assert_eq!(json, r#"{"family":"ozawa_lattice","n":6}"#);
}
