use qsample_core::generate::{generate_ghz, generate_random_circuit};
use qsample_core::sampler::sample_gate_by_gate_observed;
use qsample_core::stats::{exact_distribution, tvd};
use qsample_core::*;

fn mixed_set() -> Vec<GateKind> {
    vec![
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::rx(0.0),
        GateKind::rz(0.0),
        GateKind::Cnot,
        GateKind::Cz,
    ]
}

fn dense(n: usize) -> DenseState {
    DenseState::new(n)
}

#[test]
fn gate_by_gate_matches_exact_distribution() {
    for seed in 0..5 {
        let circuit = generate_random_circuit(5, 20, &mixed_set(), 0.3, seed).unwrap();
        let exact = exact_distribution(&circuit).unwrap();
        let result = sample_gate_by_gate(&circuit, dense, 20_000, seed).unwrap();
        let d = tvd(&result.distribution(5), &exact);
        assert!(d < 0.03, "seed {seed}: tvd {d}");
    }
}

// Shallow circuits keep the 2^n outcome spread small enough for the
// 50000-shot sampling noise to sit under 0.02.
#[test]
fn ten_qubit_statistical_contract() {
    for (n, moments) in [(3, 20), (6, 10), (10, 2)] {
        let circuit = generate_random_circuit(n, moments, &mixed_set(), 0.3, 11).unwrap();
        let exact = exact_distribution(&circuit).unwrap();
        let result = sample_gate_by_gate(&circuit, dense, 50_000, 3).unwrap();
        let d = tvd(&result.distribution(n), &exact);
        assert!(d < 0.02, "n={n}: tvd {d}");
    }
}

#[test]
fn gate_by_gate_agrees_with_qubit_by_qubit() {
    for seed in 0..5 {
        let circuit = generate_random_circuit(5, 20, &mixed_set(), 0.3, 100 + seed).unwrap();
        let a = sample_gate_by_gate(&circuit, dense, 20_000, seed).unwrap();
        let b = sample_qubit_by_qubit(&circuit, 20_000, seed).unwrap();
        assert_eq!(b.backend, "statevector");
        let d = tvd(&a.distribution(5), &b.distribution(5));
        assert!(d < 0.05, "seed {seed}: tvd {d}");
    }
}

#[test]
fn qubit_by_qubit_examples() {
    let ghz = generate_ghz(3).unwrap();
    let r = sample_qubit_by_qubit(&ghz, 2000, 1).unwrap();
    let keys: Vec<String> = r.counts.keys().map(|b| b.to_string()).collect();
    assert_eq!(keys, ["000", "111"]);

    let mut plus = Circuit::new(3).unwrap();
    for q in 0..3 {
        plus.push(GateOp::single(GateKind::H, q)).unwrap();
    }
    let r = sample_qubit_by_qubit(&plus, 10_000, 1).unwrap();
    assert_eq!(r.counts.len(), 8);
    assert_eq!(r.counts.values().sum::<u64>(), 10_000);

    let mut noisy = Circuit::new(1).unwrap();
    noisy.push(GateOp::single(GateKind::bit_flip(0.1).unwrap(), 0)).unwrap();
    assert!(matches!(
        sample_qubit_by_qubit(&noisy, 10, 0),
        Err(SimError::UnsupportedOp { .. })
    ));
}

#[test]
fn multiplicity_map_is_conserved_and_bounded() {
    for seed in 0..3 {
        let circuit = generate_random_circuit(4, 30, &mixed_set(), 0.3, seed).unwrap();
        let mut steps = 0;
        sample_gate_by_gate_observed(&circuit, dense, 1_000_000, seed, |_, map| {
            steps += 1;
            assert_eq!(map.total(), 1_000_000);
            assert!(map.len() <= 16);
        })
        .unwrap();
        assert_eq!(steps, circuit.len());
    }
}

#[test]
fn sampling_is_deterministic_per_seed() {
    let circuit = generate_random_circuit(5, 15, &mixed_set(), 0.3, 4).unwrap();
    let a = sample_gate_by_gate(&circuit, dense, 5000, 9).unwrap();
    let b = sample_gate_by_gate(&circuit, dense, 5000, 9).unwrap();
    let c = sample_gate_by_gate(&circuit, dense, 5000, 10).unwrap();
    assert_eq!(a.counts, b.counts);
    assert_ne!(a.counts, c.counts);

    let mut noisy = circuit.clone();
    noisy.push(GateOp::single(GateKind::depolarize(0.1).unwrap(), 2)).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| sample_gate_by_gate(&noisy, dense, 3000, 5).unwrap());
    let b = four.install(|| sample_gate_by_gate(&noisy, dense, 3000, 5).unwrap());
    assert_eq!(a.counts, b.counts);
}

#[test]
fn zero_bit_flip_matches_noiseless_circuit() {
    let circuit = generate_random_circuit(4, 10, &mixed_set(), 0.3, 2).unwrap();
    let mut noisy = Circuit::new(4).unwrap();
    for op in circuit.ops() {
        noisy.push(op.clone()).unwrap();
        noisy.push(GateOp::single(GateKind::bit_flip(0.0).unwrap(), op.support[0])).unwrap();
    }
    let exact = exact_distribution(&circuit).unwrap();
    let r = sample_gate_by_gate(&noisy, dense, 20_000, 1).unwrap();
    assert!(tvd(&r.distribution(4), &exact) < 0.03);
}

#[test]
fn bit_flip_rate_matches_channel() {
    let mut c = Circuit::new(1).unwrap();
    c.push(GateOp::single(GateKind::bit_flip(0.2).unwrap(), 0)).unwrap();
    c.measure_all().unwrap();
    let r = sample_gate_by_gate(&c, dense, 50_000, 8).unwrap();
    let ones = *r.counts.get(&"1".parse().unwrap()).unwrap_or(&0) as f64 / 50_000.0;
    assert!((ones - 0.2).abs() < 0.01, "P(1) = {ones}");
}

#[test]
fn mid_circuit_measure_collapses_before_cnot() {
    let mut c = Circuit::new(2).unwrap();
    c.push(GateOp::single(GateKind::H, 0)).unwrap();
    c.push(GateOp::single(GateKind::Measure, 0)).unwrap();
    c.push(GateOp::pair(GateKind::Cnot, 0, 1)).unwrap();
    c.measure_all().unwrap();
    let r = sample_gate_by_gate(&c, dense, 4000, 0).unwrap();
    let keys: Vec<String> = r.counts.keys().map(|b| b.to_string()).collect();
    assert_eq!(keys, ["00", "11"]);
    for v in r.counts.values() {
        assert!((1700..=2300).contains(v));
    }
}

#[test]
fn depolarizing_trajectories_match_mixed_state() {
    // X then depolarize(p): X and Y flip back to 0, so P(0) = 2p/3.
    let mut c = Circuit::new(1).unwrap();
    c.push(GateOp::single(GateKind::X, 0)).unwrap();
    c.push(GateOp::single(GateKind::depolarize(0.3).unwrap(), 0)).unwrap();
    let r = sample_gate_by_gate(&c, dense, 40_000, 2).unwrap();
    let zeros = *r.counts.get(&"0".parse().unwrap()).unwrap_or(&0) as f64 / 40_000.0;
    assert!((zeros - 0.2).abs() < 0.01, "P(0) = {zeros}");
}
