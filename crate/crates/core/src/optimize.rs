//! Single-qubit run merging.
//!
//! Consecutive single-qubit unitaries on the same qubit, with nothing else
//! touching that qubit in between, are fused into one `Matrix1` op so the
//! sampler resamples that qubit once instead of once per gate. Two-qubit
//! gates, channels and measurements end a run.

use crate::circuit::{mat2_mul, Circuit, GateKind, GateMatrix, GateOp, Mat2};

struct Run {
    ops: Vec<GateOp>,
    product: Mat2,
}

fn single_matrix(op: &GateOp) -> Option<Mat2> {
    if op.support.len() != 1 || !op.kind.is_unitary() {
        return None;
    }
    match op.kind.matrix()? {
        GateMatrix::One(m) => Some(m),
        GateMatrix::Two(_) => None,
    }
}

fn flush(run: Option<Run>, q: usize, out: &mut Vec<GateOp>) {
    let Some(mut run) = run else { return };
    if run.ops.len() == 1 {
        out.push(run.ops.pop().unwrap());
        return;
    }
    match GateKind::matrix1(run.product) {
        Ok(kind) => out.push(GateOp::single(kind, q)),
        // accumulated rounding pushed the product past the unitarity check
        Err(_) => out.extend(run.ops),
    }
}

/// Fuses maximal single-qubit runs. Never increases the op count and leaves
/// runs of length one untouched.
pub fn optimize_circuit(circuit: &Circuit) -> Circuit {
    let n = circuit.n_qubits();
    let mut pending: Vec<Option<Run>> = (0..n).map(|_| None).collect();
    let mut out = Vec::with_capacity(circuit.len());
    for op in circuit.ops() {
        match single_matrix(op) {
            Some(m) => {
                let q = op.support[0];
                let run = pending[q].get_or_insert_with(|| Run {
                    ops: Vec::new(),
                    product: [1.0.into(), 0.0.into(), 0.0.into(), 1.0.into()],
                });
                run.product = mat2_mul(&m, &run.product);
                run.ops.push(op.clone());
            }
            None => {
                for &q in &op.support {
                    flush(pending[q].take(), q, &mut out);
                }
                out.push(op.clone());
            }
        }
    }
    for (q, run) in pending.into_iter().enumerate() {
        flush(run, q, &mut out);
    }
    Circuit::from_ops(n, out).expect("merged ops keep circuit invariants")
}
