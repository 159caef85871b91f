mod common;

use common::*;
use wfsim::random::{random_density, random_pure_state, random_unitary, seeded};
use wfsim::{
    alice_lab_state, alice_state_pair, build_witnesses, hermitian_eigenvalues, key_security, make_channel, memory_pair,
    negativity, private_blocks, schatten1, semiclassical_bound, trace_distance, ud_povm, ud_projectors,
    wigner_state, witness_expectation, AliceModel, Bipartition, ChannelKind, ComplexMatrix, DensityMatrix,
    SubsystemLayout,
};

fn memory(rng: &mut wfsim::random::SeededRng, d: usize) -> DensityMatrix {
    random_density(rng, SubsystemLayout::new([("A", d)]).unwrap())
}

fn bip(rho: &DensityMatrix, s: &str) -> Bipartition {
    Bipartition::parse(s, rho.layout()).unwrap()
}

#[test]
fn eigenvalues_match_jacobi() {
    let mut rng = seeded(100);
    for d in 1..9 {
        for _ in 0..5 {
            let u = random_unitary(&mut rng, d.max(2));
            let diag: Vec<f64> = (0..u.rows()).map(|i| i as f64 - 1.5).collect();
            let h = u.matmul(&ComplexMatrix::diag(&diag)).unwrap().matmul(&u.adjoint()).unwrap().hermitian_part();
            let lib = hermitian_eigenvalues(&h).unwrap();
            let ora = oracle_eigenvalues(&h);
            for (a, b) in lib.iter().zip(&ora) {
                assert!((a - b).abs() < 1e-10, "{lib:?} vs {ora:?}");
            }
        }
    }
}

#[test]
fn negativity_matches_oracle_on_random_states() {
    let mut rng = seeded(101);
    let layout = SubsystemLayout::new([("a", 2), ("t", 2), ("A", 3)]).unwrap();
    for _ in 0..20 {
        let rho = random_density(&mut rng, layout.clone());
        for (s, left) in [("a|tA", vec!["a"]), ("aA|t", vec!["a", "A"]), ("at|A", vec!["a", "t"])] {
            let lib = negativity(&rho, &bip(&rho, s)).unwrap();
            assert!((lib - oracle_negativity(&rho, &left)).abs() < 1e-10, "{s}");
        }
    }
}

#[test]
fn partial_trace_matches_oracle() {
    let mut rng = seeded(102);
    let layout = SubsystemLayout::new([("x", 2), ("y", 3), ("z", 2)]).unwrap();
    let rho = random_pure_state(&mut rng, layout).to_density();
    for keep in [vec!["x"], vec!["y"], vec!["x", "z"], vec!["y", "z"]] {
        let lib = rho.partial_trace(&keep).unwrap();
        let positions: Vec<usize> = keep.iter().map(|l| rho.layout().index_of(l).unwrap()).collect();
        let ora = oracle_partial_trace(rho.matrix(), &rho.layout().dims(), &positions);
        assert!(lib.matrix().max_abs_diff(&ora).unwrap() < 1e-13);
    }
}

#[test]
fn lab_state_values() {
    let rho = alice_lab_state(0.5).unwrap();
    assert!((oracle_negativity(&rho, &["a", "m"]) - 0.5).abs() < 1e-10);
    assert!((negativity(&rho, &bip(&rho, "am|t")).unwrap() - 0.5).abs() < 1e-10);
    assert!((negativity(&rho, &bip(&rho, "a|tm")).unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn closed_form_assisted_negativity() {
    let mut rng = seeded(103);
    for d in 2..=8 {
        for _ in 0..4 {
            let (tau, ups) = (memory(&mut rng, d), memory(&mut rng, d));
            let rho = wigner_state(0.5, &tau, &ups).unwrap();
            let quarter = 0.25 * oracle_trace_norm(&tau.matrix().sub(ups.matrix()).unwrap());
            assert!((oracle_negativity(&rho, &["a"]) - quarter).abs() < 1e-9);
            assert!((negativity(&rho, &bip(&rho, "a|tA")).unwrap() - quarter).abs() < 1e-9);
        }
    }
}

#[test]
fn overlapping_memories() {
    let model = AliceModel::new(2, 0.6, make_channel(ChannelKind::Identity, 2, 0.0, None).unwrap()).unwrap();
    let (tau, ups) = alice_state_pair(&model).unwrap();
    assert!((trace_distance(&tau, &ups).unwrap() - 0.8).abs() < 1e-12);
    let rho = wigner_state(0.5, &tau, &ups).unwrap();
    assert!((oracle_negativity(&rho, &["a"]) - 0.4).abs() < 1e-10);
    assert!((schatten1(&private_blocks(&rho).unwrap().zeta_block).unwrap() - 0.4).abs() < 1e-10);
    assert!((key_security(&rho).unwrap() - 0.4).abs() < 1e-10);
}

#[test]
fn witness_expectations_match_populations() {
    let mut rng = seeded(104);
    for d in [2, 3, 4, 6] {
        let (up, down) = ud_projectors(d).unwrap();
        let (w1, w2) = build_witnesses(d, &up, &down).unwrap();
        for _ in 0..5 {
            let (tau, ups) = (memory(&mut rng, d), memory(&mut rng, d));
            let rho = wigner_state(0.5, &tau, &ups).unwrap();
            let t_uu = tau.matrix().trace_product(&up).unwrap().re;
            let u_uu = ups.matrix().trace_product(&up).unwrap().re;
            let e1 = witness_expectation(&rho, &w1).unwrap();
            assert!((e1 - 0.25 * (t_uu - u_uu)).abs() < 1e-10);
            assert!((e1 + witness_expectation(&rho, &w2).unwrap()).abs() < 1e-10);
        }
    }
}

#[test]
fn semiclassical_reference_values() {
    let diag = |a: f64, b: f64| DensityMatrix::single("A", ComplexMatrix::diag(&[a, b])).unwrap();
    let (tau, ups) = (diag(0.9, 0.1), diag(0.2, 0.8));
    let bound = semiclassical_bound(&tau, &ups, &ud_povm(2).unwrap()).unwrap();
    assert!((bound - 0.35).abs() < 1e-12);
    let rho = wigner_state(0.5, &tau, &ups).unwrap();
    assert!((oracle_negativity(&rho, &["a"]) - 0.35).abs() < 1e-10);

    let (zero, _) = memory_pair(0.0, 2).unwrap();
    let plus = DensityMatrix::single("A", ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap()).unwrap();
    let comp = wfsim::Povm::from_basis(&ComplexMatrix::identity(2)).unwrap();
    let zero = zero.to_density();
    let bound = semiclassical_bound(&zero, &plus, &comp).unwrap();
    assert!((bound - 0.25).abs() < 1e-12);
    let rho = wigner_state(0.5, &zero, &plus).unwrap();
    let ks = oracle_negativity(&rho, &["a"]);
    assert!((ks - 0.5 * std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
}

#[test]
fn traced_state_is_bell_mixture() {
    let mut rng = seeded(105);
    for p in [0.0, 0.25, 0.5, 0.8] {
        let (tau, ups) = (memory(&mut rng, 3), memory(&mut rng, 3));
        let rho = wigner_state(p, &tau, &ups).unwrap();
        let at = oracle_partial_trace(rho.matrix(), &rho.layout().dims(), &[0, 1]);
        let at = DensityMatrix::new(SubsystemLayout::qubits(&["a", "t"]), at).unwrap();
        assert!((oracle_negativity(&at, &["a"]) - (0.5 - p).abs()).abs() < 1e-10);
    }
}
