//! Dense state-vector backend, the reference oracle for the other backends.

use num_complex::Complex64;

use super::{sample_channel_pauli, StateBackend};
use crate::circuit::{BitString, Circuit, GateKind, GateMatrix, GateOp, Mat2, Mat4};
use crate::error::{Result, SimError};
use crate::rng::RngStream;

/// `2^n` amplitudes indexed by the big-endian encoding of the bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn new(n_qubits: usize) -> Self {
        assert!(n_qubits <= 30, "dense state limited to 30 qubits");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        DenseState { n_qubits, amps }
    }

    /// Evolves `|0..0>` through every unitary op of `circuit`.
    /// Measurements are skipped; channels are rejected.
    pub fn simulate(circuit: &Circuit) -> Result<Self> {
        let mut state = DenseState::new(circuit.n_qubits());
        for op in circuit.ops() {
            if op.kind.is_channel() {
                return Err(state.unsupported(&op.kind));
            }
            state.apply_unitary(op);
        }
        Ok(state)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn amplitude(&self, bits: &BitString) -> Complex64 {
        self.amps[bits.to_index() as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    pub fn apply_matrix1(&mut self, q: usize, m: &Mat2) {
        let mask = self.mask(q);
        for i in 0..self.amps.len() {
            if i & mask != 0 {
                continue;
            }
            let a0 = self.amps[i];
            let a1 = self.amps[i | mask];
            self.amps[i] = m[0] * a0 + m[1] * a1;
            self.amps[i | mask] = m[2] * a0 + m[3] * a1;
        }
    }

    pub fn apply_matrix2(&mut self, q0: usize, q1: usize, m: &Mat4) {
        let (m0, m1) = (self.mask(q0), self.mask(q1));
        for i in 0..self.amps.len() {
            if i & (m0 | m1) != 0 {
                continue;
            }
            let idx = [i, i | m1, i | m0, i | m0 | m1];
            let v = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                let row = &m[r * 4..r * 4 + 4];
                self.amps[k] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
        }
    }

    fn apply_unitary(&mut self, op: &GateOp) {
        match op.kind.matrix() {
            Some(GateMatrix::One(m)) => self.apply_matrix1(op.support[0], &m),
            Some(GateMatrix::Two(m)) => self.apply_matrix2(op.support[0], op.support[1], &m),
            None => {}
        }
    }
}

impl StateBackend for DenseState {
    fn name(&self) -> &'static str {
        "statevector"
    }

    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn supports(&self, _kind: &GateKind) -> bool {
        true
    }

    fn apply_op(&mut self, op: &GateOp, rng: &mut RngStream) -> Result<()> {
        if op.kind.is_channel() {
            if let Some(pauli) = sample_channel_pauli(&op.kind, rng) {
                self.apply_unitary(&GateOp::new(pauli, op.support.clone()));
            }
        } else {
            self.apply_unitary(op);
        }
        Ok(())
    }

    fn probability(&self, bits: &BitString) -> f64 {
        self.amplitude(bits).norm_sqr()
    }

    fn is_stochastic(&self, kind: &GateKind) -> bool {
        kind.is_channel()
    }

    fn supports_projection(&self) -> bool {
        true
    }

    fn project(&mut self, qubit: usize, bit: bool) -> Result<()> {
        let mask = self.mask(qubit);
        let mut kept = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask != 0) != bit {
                *a = Complex64::new(0.0, 0.0);
            } else {
                kept += a.norm_sqr();
            }
        }
        if kept < 1e-300 {
            return Err(SimError::InvalidSpec(format!(
                "projection of qubit {qubit} onto {} has zero weight",
                bit as u8
            )));
        }
        let scale = 1.0 / kept.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= scale);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apply(state: &mut DenseState, kind: GateKind, support: &[usize]) {
        state.apply_unitary(&GateOp::new(kind, support.to_vec()));
    }

    #[test]
    fn x_on_first_qubit_sets_leftmost_bit() {
        let mut s = DenseState::new(2);
        apply(&mut s, GateKind::X, &[0]);
        assert_eq!(s.probability(&"10".parse().unwrap()), 1.0);
    }

    #[test]
    fn hadamard_squares_to_identity() {
        let mut s = DenseState::new(1);
        apply(&mut s, GateKind::H, &[0]);
        apply(&mut s, GateKind::H, &[0]);
        assert!((s.amps[0] - 1.0).norm() < 1e-12);
        assert!(s.amps[1].norm() < 1e-12);
    }

    #[test]
    fn bell_state_probabilities() {
        let mut s = DenseState::new(2);
        apply(&mut s, GateKind::H, &[0]);
        apply(&mut s, GateKind::Cnot, &[0, 1]);
        assert!((s.probability(&"00".parse().unwrap()) - 0.5).abs() < 1e-12);
        assert_eq!(s.probability(&"01".parse().unwrap()), 0.0);
    }

    #[test]
    fn cnot_respects_support_order() {
        let mut s = DenseState::new(2);
        apply(&mut s, GateKind::X, &[1]);
        apply(&mut s, GateKind::Cnot, &[1, 0]);
        assert_eq!(s.probability(&"11".parse().unwrap()), 1.0);
    }

    #[test]
    fn projection_renormalizes() {
        let mut s = DenseState::new(2);
        apply(&mut s, GateKind::H, &[0]);
        apply(&mut s, GateKind::H, &[1]);
        s.project(0, true).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((s.probability(&"10".parse().unwrap()) - 0.5).abs() < 1e-12);
        assert!(s.project(0, false).is_err());
    }

    #[test]
    fn norm_drift_over_many_ops() {
        let mut s = DenseState::new(4);
        let kinds = [GateKind::H, GateKind::T, GateKind::rx(0.3), GateKind::ry(1.1)];
        for i in 0..1000 {
            apply(&mut s, kinds[i % 4].clone(), &[i % 4]);
            if i % 3 == 0 {
                apply(&mut s, GateKind::Cnot, &[i % 4, (i + 1) % 4]);
            }
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
