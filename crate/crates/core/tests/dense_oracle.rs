use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qsample_core::generate::generate_random_circuit;
use qsample_core::{Circuit, DenseState, GateKind, GateOp};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn one_qubit(kind: &GateKind) -> DMatrix<Complex64> {
    let (r, i0) = (FRAC_1_SQRT_2, c(0.0, 0.0));
    let rot = |t: f64| ((t / 2.0).cos(), (t / 2.0).sin());
    let m = match kind {
        GateKind::H => [c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)],
        GateKind::X => [i0, c(1.0, 0.0), c(1.0, 0.0), i0],
        GateKind::Y => [i0, c(0.0, -1.0), c(0.0, 1.0), i0],
        GateKind::Z => [c(1.0, 0.0), i0, i0, c(-1.0, 0.0)],
        GateKind::S => [c(1.0, 0.0), i0, i0, c(0.0, 1.0)],
        GateKind::T => [c(1.0, 0.0), i0, i0, Complex64::from_polar(1.0, PI / 4.0)],
        GateKind::Rx(a) => {
            let (co, si) = rot(a.radians());
            [c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)]
        }
        GateKind::Ry(a) => {
            let (co, si) = rot(a.radians());
            [c(co, 0.0), c(-si, 0.0), c(si, 0.0), c(co, 0.0)]
        }
        GateKind::Rz(a) => {
            let t = a.radians();
            [Complex64::from_polar(1.0, -t / 2.0), i0, i0, Complex64::from_polar(1.0, t / 2.0)]
        }
        other => panic!("no oracle for {other}"),
    };
    DMatrix::from_row_slice(2, 2, &m)
}

fn embed(n: usize, q: usize, u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut full = DMatrix::<Complex64>::identity(1, 1);
    for k in 0..n {
        let factor = if k == q { u.clone() } else { DMatrix::identity(2, 2) };
        full = full.kronecker(&factor);
    }
    full
}

fn bit(i: usize, q: usize, n: usize) -> usize {
    (i >> (n - 1 - q)) & 1
}

fn two_qubit(n: usize, kind: &GateKind, a: usize, b: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let (ba, bb) = (bit(i, a, n), bit(i, b, n));
        let (j, phase) = match kind {
            GateKind::Cnot if ba == 1 => (i ^ (1 << (n - 1 - b)), 1.0),
            GateKind::Cz if ba == 1 && bb == 1 => (i, -1.0),
            GateKind::Swap if ba != bb => (i ^ (1 << (n - 1 - a)) ^ (1 << (n - 1 - b)), 1.0),
            _ => (i, 1.0),
        };
        m[(j, i)] = c(phase, 0.0);
    }
    m
}

fn oracle_state(circuit: &Circuit) -> DVector<Complex64> {
    let n = circuit.n_qubits();
    let mut psi = DVector::<Complex64>::zeros(1 << n);
    psi[0] = c(1.0, 0.0);
    for op in circuit.ops() {
        let u = match op.support.as_slice() {
            [q] => embed(n, *q, &one_qubit(&op.kind)),
            [a, b] => two_qubit(n, &op.kind, *a, *b),
            _ => continue,
        };
        psi = u * psi;
    }
    psi
}

fn assert_matches(circuit: &Circuit) {
    let dense = DenseState::simulate(circuit).unwrap();
    let oracle = oracle_state(circuit);
    for (k, (a, b)) in dense.amplitudes().iter().zip(oracle.iter()).enumerate() {
        assert!((a - b).norm() < 1e-12, "index {k}: {a} vs {b}");
    }
}

#[test]
fn three_qubit_gates_match_kronecker_products() {
    let singles = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::rx(0.7),
        GateKind::ry(-1.3),
        GateKind::rz(2.1),
    ];
    for kind in &singles {
        for q in 0..3 {
            let mut circuit = Circuit::new(3).unwrap();
            for p in 0..3 {
                circuit.push(GateOp::single(GateKind::ry(0.4 + p as f64), p)).unwrap();
            }
            circuit.push(GateOp::single(kind.clone(), q)).unwrap();
            assert_matches(&circuit);
        }
    }
    for kind in [GateKind::Cnot, GateKind::Cz, GateKind::Swap] {
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    continue;
                }
                let mut circuit = Circuit::new(3).unwrap();
                for p in 0..3 {
                    circuit.push(GateOp::single(GateKind::rx(0.3 + 0.5 * p as f64), p)).unwrap();
                    circuit.push(GateOp::single(GateKind::T, p)).unwrap();
                }
                circuit.push(GateOp::pair(kind.clone(), a, b)).unwrap();
                assert_matches(&circuit);
            }
        }
    }
}

#[test]
fn random_circuits_match_kronecker_products() {
    let set = [
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::rx(0.0),
        GateKind::ry(0.0),
        GateKind::rz(0.0),
        GateKind::Cnot,
        GateKind::Cz,
        GateKind::Swap,
    ];
    for seed in 0..10 {
        let circuit = generate_random_circuit(4, 15, &set, 0.4, seed).unwrap();
        assert_matches(&circuit);
    }
}

#[test]
fn qubit_zero_is_most_significant() {
    let mut circuit = Circuit::new(3).unwrap();
    circuit.push(GateOp::single(GateKind::X, 0)).unwrap();
    let dense = DenseState::simulate(&circuit).unwrap();
    assert!((dense.amplitudes()[0b100] - c(1.0, 0.0)).norm() < 1e-15);
}
