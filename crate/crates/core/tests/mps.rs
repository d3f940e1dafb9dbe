use qsample_core::generate::{generate_ghz_random_cnot, generate_random_circuit};
use qsample_core::stats::{exact_distribution, tvd};
use qsample_core::*;

fn gate_set() -> Vec<GateKind> {
    vec![
        GateKind::H,
        GateKind::T,
        GateKind::rx(0.0),
        GateKind::ry(0.0),
        GateKind::rz(0.0),
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Swap,
    ]
}

fn evolve(circuit: &Circuit, chi_max: Option<usize>) -> MpsState {
    let mut state = MpsState::new(circuit.n_qubits(), chi_max);
    let mut rng = RngStream::new(0, 0);
    for op in circuit.ops() {
        state.apply_op(op, &mut rng).unwrap();
    }
    state
}

#[test]
fn unbounded_mps_matches_dense_probabilities() {
    for seed in 0..8 {
        let circuit = generate_random_circuit(8, 20, &gate_set(), 0.4, seed).unwrap();
        let mps = evolve(&circuit, None);
        let exact = exact_distribution(&circuit).unwrap();
        let mut total = 0.0;
        for (i, p) in exact.iter().enumerate() {
            let q = mps.probability(&BitString::from_index(i as u64, 8));
            assert!((q - p).abs() < 1e-8, "seed {seed}, index {i}: {q} vs {p}");
            total += q;
        }
        assert!((total - 1.0).abs() < 1e-8);
        assert_eq!(mps.truncation_error(), 0.0);
    }
}

#[test]
fn full_contraction_matches_dense_amplitudes() {
    for seed in 0..5 {
        let circuit = generate_random_circuit(6, 15, &gate_set(), 0.5, seed).unwrap();
        let mps = evolve(&circuit, None);
        let dense = DenseState::simulate(&circuit).unwrap();
        for (a, b) in mps.to_dense().iter().zip(dense.amplitudes()) {
            assert!((a - b).norm() < 1e-8);
        }
    }
}

#[test]
fn contraction_order_does_not_matter() {
    let circuit = generate_random_circuit(7, 12, &gate_set(), 0.5, 3).unwrap();
    let mps = evolve(&circuit, None);
    for i in 0..128 {
        let b = BitString::from_index(i, 7);
        assert!((mps.amplitude(&b) - mps.amplitude_rtl(&b)).norm() < 1e-10);
    }
}

#[test]
fn truncation_error_never_decreases() {
    let circuit = generate_random_circuit(8, 20, &gate_set(), 0.5, 1).unwrap();
    let mut state = MpsState::new(8, Some(2));
    let mut rng = RngStream::new(0, 0);
    let mut last = 0.0;
    for op in circuit.ops() {
        state.apply_op(op, &mut rng).unwrap();
        assert!(state.truncation_error() >= last);
        assert!(state.max_bond() <= 2);
        last = state.truncation_error();
    }
    assert!(last > 0.0);
}

#[test]
fn mps_sampling_matches_dense() {
    for seed in 0..4 {
        let circuit = generate_random_circuit(8, 4, &gate_set(), 0.4, seed).unwrap();
        let exact = exact_distribution(&circuit).unwrap();
        let r = sample_gate_by_gate(&circuit, |n| MpsState::new(n, None), 20_000, seed).unwrap();
        assert_eq!(r.backend, "mps");
        let d = tvd(&r.distribution(8), &exact);
        assert!(d < 0.03, "seed {seed}: tvd {d}");
    }
}

#[test]
fn random_ghz_keeps_bond_dimension_two() {
    for seed in 0..4 {
        let circuit = generate_ghz_random_cnot(12, seed).unwrap();
        let mps = evolve(&circuit, None);
        assert!(mps.max_bond() <= 2);
        let zeros = BitString::zeros(12);
        assert!((mps.probability(&zeros) - 0.5).abs() < 1e-10);
        assert!((mps.probability(&zeros.complement()) - 0.5).abs() < 1e-10);
    }
}

#[test]
fn truncated_sampling_still_normalized() {
    let circuit = generate_random_circuit(6, 10, &gate_set(), 0.5, 9).unwrap();
    let r = sample_gate_by_gate(&circuit, |n| MpsState::new(n, Some(1)), 2000, 0).unwrap();
    assert_eq!(r.counts.values().sum::<u64>(), 2000);
}
