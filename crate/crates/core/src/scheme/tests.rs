use super::*;
use crate::obs::{born, spectral_pvm, validate_povm, Geometry, DEFAULT_MERGE_TOL};
use crate::qcore::random::{haar_unitary, random_density, random_hermitian, random_state};
use crate::qcore::{mat_exp_i, partial_trace_matrix, pauli, CompositeSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn pm_outcomes() -> OutcomeSet {
    OutcomeSet::from_values(&[1.0, -1.0], Geometry::Linear).unwrap()
}

fn plus() -> StateVector {
    StateVector::normalized(vec![c(1.0), c(1.0)]).unwrap()
}

fn pvm(a: &ComplexMatrix) -> DiscreteObservable {
    spectral_pvm(a, DEFAULT_MERGE_TOL).unwrap()
}

fn swap_scheme(pointer: &DiscreteObservable, phi: StateVector) -> MeasurementScheme {
    let d = pointer.dim();
    MeasurementScheme::unscaled(
        d,
        d,
        Coupling::Dense(pauli::swap(d)),
        PointerPvm::from_observable(pointer).unwrap(),
        phi,
    )
    .unwrap()
}

fn cnot_scheme() -> MeasurementScheme {
    MeasurementScheme::unscaled(
        2,
        2,
        Coupling::Dense(pauli::cnot()),
        PointerPvm::computational(pm_outcomes()).unwrap(),
        StateVector::basis(2, 0),
    )
    .unwrap()
}

/// `E(y) = Γ_φ(Σ_{f(x)=y} U*(I⊗Z(x))U)` built from dense matrices.
fn dense_measured(m: &MeasurementScheme) -> Vec<ComplexMatrix> {
    let s = m.system_dim();
    let sigma = m.apparatus_state().density();
    let mut sums = vec![ComplexMatrix::zeros(s * m.apparatus_dim(), s * m.apparatus_dim()); m.targets().len()];
    for (x, l) in m.pointer().outcomes().labels().enumerate() {
        let h = m.heisenberg_pointer(l).unwrap();
        let t = m.relabel()[x];
        sums[t] = sums[t].add_mat(&h);
    }
    sums.iter().map(|lam| restrict(lam, &sigma).unwrap()).collect()
}

fn random_scheme(rng: &mut ChaCha8Rng, s: usize, a: usize) -> MeasurementScheme {
    let k = rng.random_range(1..=a);
    let values: Vec<f64> = (0..k).map(|i| i as f64 - 0.5 * k as f64).collect();
    let outcomes = OutcomeSet::from_values(&values, Geometry::Linear).unwrap();
    let mut partition: Vec<usize> = (0..a).map(|c| if c < k { c } else { rng.random_range(0..k) }).collect();
    partition.rotate_left(rng.random_range(0..a));
    let pointer = PointerPvm::new(outcomes, haar_unitary(rng, a), partition).unwrap();
    MeasurementScheme::unscaled(s, a, Coupling::Dense(haar_unitary(rng, s * a)), pointer, random_state(rng, a))
        .unwrap()
}

#[test]
fn restrict_product_and_unital() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_hermitian(&mut rng, 3);
    let b = random_hermitian(&mut rng, 2);
    let sigma = random_density(&mut rng, 2);
    let got = restrict(&a.kron(&b), &sigma).unwrap();
    let expect = a.scale(sigma.expect(&b));
    assert!(got.sub_mat(&expect).max_abs() < 1e-12);

    let id = restrict(&ComplexMatrix::identity(6), &sigma).unwrap();
    assert!(id.sub_mat(&ComplexMatrix::identity(3)).max_abs() < 1e-12);

    let zero = StateVector::basis(2, 0).density();
    let r = restrict(&pauli::x().kron(&pauli::z()), &zero).unwrap();
    assert!(r.sub_mat(&pauli::x()).max_abs() < 1e-15);
}

#[test]
fn restrict_trace_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let lam = random_hermitian(&mut rng, 12);
    let sigma = random_density(&mut rng, 4);
    let g = restrict(&lam, &sigma).unwrap();
    for _ in 0..5 {
        let rho = random_density(&mut rng, 3);
        let lhs = rho.matrix().matmul(&g).trace();
        let rhs = rho.tensor(&sigma).matrix().matmul(&lam).trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn restrict_rejects_bad_split() {
    let sigma = DensityOperator::maximally_mixed(4);
    assert!(matches!(
        restrict(&ComplexMatrix::identity(6), &sigma),
        Err(WayError::DimensionMismatch(_))
    ));
}

#[test]
fn heisenberg_pointer_examples() {
    let px = pvm(&pauli::x());
    let m = MeasurementScheme::unscaled(
        2,
        2,
        Coupling::identity(4),
        PointerPvm::from_observable(&px).unwrap(),
        StateVector::basis(2, 0),
    )
    .unwrap();
    let z1 = px.effect("1").unwrap();
    let h = m.heisenberg_pointer("1").unwrap();
    assert!(h.sub_mat(&ComplexMatrix::identity(2).kron(z1)).max_abs() < 1e-14);

    let sw = swap_scheme(&px, StateVector::basis(2, 0));
    let h = sw.heisenberg_pointer("-1").unwrap();
    let z = px.effect("-1").unwrap();
    assert!(h.sub_mat(&z.kron(&ComplexMatrix::identity(2))).max_abs() < 1e-14);
    assert!(h.matmul(&h).sub_mat(&h).max_abs() < 1e-14);
    assert!(matches!(sw.heisenberg_pointer("7"), Err(WayError::UnknownOutcome(_))));
}

#[test]
fn swap_transplants_pointer() {
    let px = pvm(&pauli::x());
    let m = swap_scheme(&px, StateVector::basis(2, 0));
    assert!(m.prc_defect(&px).unwrap() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p3 = pvm(&random_hermitian(&mut rng, 3));
    let m3 = swap_scheme(&p3, random_state(&mut rng, 3));
    assert!(m3.prc_defect(&p3).unwrap() < 1e-12);
}

#[test]
fn identity_coupling_gives_trivial_observable() {
    let m = MeasurementScheme::unscaled(
        2,
        2,
        Coupling::identity(4),
        PointerPvm::computational(pm_outcomes()).unwrap(),
        plus(),
    )
    .unwrap();
    let e = m.measured_observable();
    for eff in e.effects() {
        assert!(eff.sub_mat(&ComplexMatrix::identity(2).scale_re(0.5)).max_abs() < 1e-14);
    }
    let pz = pvm(&pauli::z());
    assert!((m.prc_defect(&pz).unwrap() - 0.5).abs() < 1e-12);
    assert!(m.repeatability_defect() > 0.1);
}

#[test]
fn cnot_is_lueders_sigma_z() {
    let m = cnot_scheme();
    let pz = pvm(&pauli::z());
    assert!(m.prc_defect(&pz).unwrap() < 1e-14);
    assert!(m.repeatability_defect() < 1e-14);
    let px = pvm(&pauli::x());
    assert!((m.prc_defect(&px).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn repeatability_brute_force_swap_plus() {
    let px = pvm(&pauli::x());
    let m = swap_scheme(&px, plus());
    let e = m.measured_observable();
    let u = pauli::swap(2);
    let sigma = m.apparatus_state().density();
    let mut worst: f64 = 0.0;
    for (y, l) in px.outcomes().labels().enumerate() {
        let z = px.effect(l).unwrap();
        let op = u.adjoint().matmul(&e.effects()[y].kron(z)).matmul(&u);
        let r = restrict(&op, &sigma).unwrap();
        worst = worst.max(op_norm(&r.sub_mat(&e.effects()[y])));
    }
    assert!((m.repeatability_defect() - worst).abs() < 1e-12);
    // |+> is an eigenstate of the σ_x pointer: the SWAP writes it back into S
    // so a repetition reads +1 regardless of the first outcome
    assert!(worst > 0.4);
}

#[test]
fn fast_route_matches_dense_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let s = rng.random_range(1..=4);
        let a = rng.random_range(1..=4);
        let m = random_scheme(&mut rng, s, a);
        let fast = m.measured_observable();
        let report = validate_povm(&fast);
        assert!(report.normalisation_residual < 1e-10 && report.positivity_violation < 1e-10);
        for (f, d) in fast.effects().iter().zip(dense_measured(&m)) {
            assert!(f.sub_mat(&d).max_abs() < 1e-12);
        }
    }
}

#[test]
fn prc_identity_against_joint_statistics() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let (s, a) = (rng.random_range(1..=3), rng.random_range(2..=4));
        let m = random_scheme(&mut rng, s, a);
        let rho = random_density(&mut rng, s);
        let joint = rho.tensor(&m.apparatus_state().density());
        let u = m.coupling().to_dense();
        let evolved = u.matmul(joint.matrix()).matmul(&u.adjoint());
        let app = partial_trace_matrix(&evolved, &CompositeSpace::new(vec![s, a]).unwrap(), 1).unwrap();
        let born_e = born(&rho, &m.measured_observable()).unwrap();
        for (x, w) in born_e.weights().iter().enumerate() {
            let p = app.matmul(&m.pointer().projection(x)).trace().re;
            assert!((p - w).abs() < 1e-10);
        }
    }
}

#[test]
fn repeatability_defect_matches_dense_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let (s, a) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let m = random_scheme(&mut rng, s, a);
        let e = m.measured_observable();
        let u = m.coupling().to_dense();
        let sigma = m.apparatus_state().density();
        let mut worst: f64 = 0.0;
        for y in 0..e.len() {
            let op = u.adjoint().matmul(&e.effects()[y].kron(&m.pointer().projection(y))).matmul(&u);
            let r = restrict(&op, &sigma).unwrap();
            worst = worst.max(op_norm(&r.sub_mat(&e.effects()[y])));
        }
        assert!((m.repeatability_defect() - worst).abs() < 1e-10);
    }
}

#[test]
fn conservation_examples() {
    let sw = swap_scheme(&pvm(&pauli::x()), StateVector::basis(2, 0));
    let zz = ConservedPair::new(pauli::z(), pauli::z()).unwrap();
    assert!(sw.conservation_defect(&zz).unwrap() < 1e-14);

    let cn = cnot_scheme();
    let z0 = ConservedPair::new(pauli::z(), ComplexMatrix::zeros(2, 2)).unwrap();
    assert!(cn.conservation_defect(&z0).unwrap() < 1e-14);
    let d = cn.conservation_defect(&zz).unwrap();
    let total = zz.total();
    let oracle = op_norm(&pauli::cnot().matmul(&total).sub_mat(&total.matmul(&pauli::cnot())));
    assert!(d > 1.0 && (d - oracle).abs() < 1e-12);
}

#[test]
fn yanase_examples() {
    let sw = swap_scheme(&pvm(&pauli::x()), StateVector::basis(2, 0));
    let zz = ConservedPair::new(pauli::z(), pauli::z()).unwrap();
    assert!((sw.yanase_defect(&zz).unwrap() - 2.0).abs() < 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let la = random_hermitian(&mut rng, 3);
    let ls = random_hermitian(&mut rng, 3);
    let m = swap_scheme(&pvm(&la), random_state(&mut rng, 3));
    let pair = ConservedPair::new(ls, la).unwrap();
    assert!(m.yanase_defect(&pair).unwrap() < 1e-10);

    let cn = cnot_scheme();
    let z0 = ConservedPair::new(pauli::z(), ComplexMatrix::zeros(2, 2)).unwrap();
    assert!(cn.yanase_defect(&z0).unwrap() < 1e-14);
    assert!(cn.weak_yanase_defect(&z0).unwrap() < 1e-12);
}

#[test]
fn dimension_mismatch_on_pair() {
    let cn = cnot_scheme();
    let bad = ConservedPair::new(ComplexMatrix::identity(3), pauli::z()).unwrap();
    assert!(matches!(cn.conservation_defect(&bad), Err(WayError::DimensionMismatch(_))));
}

#[test]
fn matrix_free_audits_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (s, a) = (12, 15);
    let ls = ComplexMatrix::from_real_diag(&(0..s).map(|k| (k % 3) as f64).collect::<Vec<_>>());
    let la = random_hermitian(&mut rng, a);
    let diag: Vec<C64> = (0..s * a).map(|_| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect();
    let pointer = PointerPvm::computational(OutcomeSet::cyclic_positions(a)).unwrap();
    let m = MeasurementScheme::unscaled(s, a, Coupling::Diagonal(diag.clone()), pointer, random_state(&mut rng, a))
        .unwrap();
    for pair in [
        ConservedPair::new(ls.clone(), la.clone()).unwrap(),
        ConservedPair::cyclic(ls.clone(), ComplexMatrix::from_real_diag(&vec![1.0; a]), 3).unwrap(),
    ] {
        let l = pair.symmetry_op().to_dense();
        let u = ComplexMatrix::from_diag(&diag);
        let oracle = crate::qcore::herm_eig(&{
            let cm = u.matmul(&l).sub_mat(&l.matmul(&u));
            cm.adjoint().matmul(&cm)
        })
        .unwrap()
        .values
        .last()
        .copied()
        .unwrap()
        .max(0.0)
        .sqrt();
        let got = m.conservation_defect(&pair).unwrap();
        assert!((got - oracle).abs() < 1e-8 * oracle.max(1.0), "{got} vs {oracle}");
    }
    // weak Yanase through the matrix-free route against a dense evaluation
    let pair = ConservedPair::new(ls, la).unwrap();
    let z = m.pointer().operator();
    let u = ComplexMatrix::from_diag(&diag);
    let h = u.adjoint().matmul(&ComplexMatrix::identity(s).kron(&z)).matmul(&u);
    let l = pair.total();
    let cm = h.matmul(&l).sub_mat(&l.matmul(&h));
    let oracle = crate::qcore::herm_eig(&cm.adjoint().matmul(&cm)).unwrap().values.last().unwrap().sqrt();
    let got = m.weak_yanase_defect(&pair).unwrap();
    assert!((got - oracle).abs() < 1e-8 * oracle, "{got} vs {oracle}");
}

#[test]
fn cyclic_pair_uses_group_unitary() {
    let n = 4;
    let l = ComplexMatrix::from_real_diag(&[0.0, 1.0, 2.0, 3.0]);
    let pair = ConservedPair::cyclic(l.clone(), l.clone(), n).unwrap();
    let expect = mat_exp_i(&l, 2.0 * std::f64::consts::PI / n as f64).unwrap();
    assert!(pair.system_op().sub_mat(&expect).max_abs() < 1e-14);
    assert!((pair.system_op()[(1, 1)] - C64::new(0.0, 1.0)).norm() < 1e-14);
}

#[test]
fn strong_way_invariance_for_block_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let ls_diag = [0.0, 0.0, 1.0];
    let ls = ComplexMatrix::from_real_diag(&ls_diag);
    for _ in 0..20 {
        let a = 2;
        // blocks of U per L_S eigenvalue act on span{e_i ⊗ apparatus}
        let mut u = ComplexMatrix::zeros(6, 6);
        for block in [vec![0usize, 1], vec![2]] {
            let idx: Vec<usize> = block.iter().flat_map(|&i| (0..a).map(move |k| i * a + k)).collect();
            let h = haar_unitary(&mut rng, idx.len());
            for (p, &i) in idx.iter().enumerate() {
                for (q, &j) in idx.iter().enumerate() {
                    u[(i, j)] = h[(p, q)];
                }
            }
        }
        let pointer = PointerPvm::new(pm_outcomes(), haar_unitary(&mut rng, 2), vec![0, 1]).unwrap();
        let m = MeasurementScheme::unscaled(3, 2, Coupling::Dense(u), pointer, random_state(&mut rng, 2)).unwrap();
        let e = m.measured_observable();
        for ell in [0.1, 0.7, 2.3] {
            let g = mat_exp_i(&ls, ell).unwrap();
            for eff in e.effects() {
                let moved = g.matmul(eff).matmul(&g.adjoint());
                assert!(op_norm(&moved.sub_mat(eff)) < 1e-9);
            }
        }
    }
}

#[test]
fn scaled_relabel_merges_outcomes() {
    // pointer {0,1,2} read on targets {+1,-1} with 0,1 ↦ +1
    let pointer = PointerPvm::computational(OutcomeSet::from_values(&[0.0, 1.0, 2.0], Geometry::Linear).unwrap()).unwrap();
    let targets = pm_outcomes();
    let m = MeasurementScheme::new(
        1,
        3,
        Coupling::identity(3),
        pointer,
        StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap(),
        targets,
        vec![0, 0, 1],
    )
    .unwrap();
    let e = m.measured_observable();
    assert!((e.effects()[0][(0, 0)].re - 0.36).abs() < 1e-14);
    assert!((e.effects()[1][(0, 0)].re - 0.64).abs() < 1e-14);
    let zs = m.scaled_pointer();
    assert!((zs[(2, 2)] - c(-1.0)).norm() < 1e-15 && (zs[(0, 0)] - c(1.0)).norm() < 1e-15);
}

#[test]
fn validation_errors() {
    let mut bad = pauli::cnot();
    bad[(0, 0)] = c(1.001);
    let err = MeasurementScheme::unscaled(
        2,
        2,
        Coupling::Dense(bad),
        PointerPvm::computational(pm_outcomes()).unwrap(),
        StateVector::basis(2, 0),
    )
    .unwrap_err();
    assert!(matches!(err, WayError::NotUnitary { residual } if residual > 1e-4));

    let p = PointerPvm::new(pm_outcomes(), ComplexMatrix::identity(2), vec![0, 2]);
    assert!(p.is_err());
    let unsharp = DiscreteObservable::trivial(pm_outcomes(), &[0.5, 0.5], 2).unwrap();
    assert!(PointerPvm::from_observable(&unsharp).is_err());
}

#[test]
fn serde_round_trip_with_relabel() {
    let pointer = PointerPvm::computational(OutcomeSet::from_values(&[0.0, 1.0, 2.0], Geometry::Linear).unwrap()).unwrap();
    let m = MeasurementScheme::new(
        1,
        3,
        Coupling::identity(3),
        pointer,
        StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap(),
        pm_outcomes(),
        vec![0, 0, 1],
    )
    .unwrap();
    let json = serde_json::to_string(&m).unwrap();
    let back: MeasurementScheme = serde_json::from_str(&json).unwrap();
    assert_eq!(back, m);
    let cn = cnot_scheme();
    let back: MeasurementScheme = serde_json::from_str(&serde_json::to_string(&cn).unwrap()).unwrap();
    assert_eq!(back, cn);
}
