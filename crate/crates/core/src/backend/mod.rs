//! State backends: an opaque state plus `apply_op` and `probability`.

pub mod mps;
pub mod stabilizer;
pub mod statevector;


use crate::circuit::{BitString, Circuit, GateKind, GateOp};
use crate::error::{Result, SimError};
use crate::rng::RngStream;


pub use mps::MpsState;
pub use stabilizer::ChForm;
pub use statevector::DenseState;

/// Contract every simulation backend implements for the samplers.
///
/// Cloning yields an independent copy of the state.
pub trait StateBackend: Clone + Send + Sync {
    fn name(&self) -> &'static str;

    fn n_qubits(&self) -> usize;

    fn supports(&self, kind: &GateKind) -> bool;

    /// Applies a unitary op (or a no-op `Measure`). Stochastic backends draw
    /// from `rng`; deterministic ones ignore it.
    fn apply_op(&mut self, op: &GateOp, rng: &mut RngStream) -> Result<()>;

    /// Born probability `|<b|psi>|^2` of a full-width bitstring.
    fn probability(&self, bits: &BitString) -> f64;

    /// True when applying `kind` samples a random branch, so a single state
    /// evolution cannot serve all shots.
    fn is_stochastic(&self, _kind: &GateKind) -> bool {
        false
    }

    /// Whether [`StateBackend::project`] is available, which mid-circuit
    /// measurements require.
    fn supports_projection(&self) -> bool {
        false
    }

    /// Projects `qubit` onto `bit` and renormalizes.
    fn project(&mut self, _qubit: usize, _bit: bool) -> Result<()> {
        Err(self.unsupported(&GateKind::Measure))
    }

    fn needs_trajectories(&self, circuit: &Circuit) -> bool {
        circuit.ops().iter().any(|op| self.is_stochastic(&op.kind))
    }

    fn unsupported(&self, kind: &GateKind) -> SimError {
        SimError::UnsupportedOp {
            backend: self.name().to_string(),
            kind: kind.to_string(),
        }
    }
}

/// Draws the Pauli a single-qubit channel applies on one trajectory:
/// bit flip applies X with probability p; depolarizing applies X, Y, Z with
/// probability p/3 each. `None` means identity.
pub fn sample_channel_pauli(kind: &GateKind, rng: &mut RngStream) -> Option<GateKind> {
    use rand::Rng;
    match kind {
        GateKind::BitFlip(p) => (rng.random::<f64>() < p.value()).then_some(GateKind::X),
        GateKind::Depolarize(p) => {
            let u: f64 = rng.random();
            let third = p.value() / 3.0;
            if u < third {
                Some(GateKind::X)
            } else if u < 2.0 * third {
                Some(GateKind::Y)
            } else if u < p.value() {
                Some(GateKind::Z)
            } else {
                None
            }
        }
        _ => None,
    }
}
