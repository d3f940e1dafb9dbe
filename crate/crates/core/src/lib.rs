//! Gate-by-gate weak simulation of quantum circuits.
//!
//! Circuits are sampled by walking the gate list once and resampling the
//! bits a gate touches from the Born probabilities of the candidate
//! bitstrings, using any backend that can apply a gate and report the
//! probability of a single bitstring. Three backends ship with the crate:
//! a dense state vector, a CH-form stabilizer state with sum-over-Cliffords
//! branch sampling for `Rz`, and a matrix product state.

pub mod backend;
pub mod circuit;
pub mod error;
pub mod generate;
pub mod optimize;
pub mod qasm;
pub mod rng;
pub mod sampler;
pub mod stats;

pub use backend::{ChForm, DenseState, MpsState, StateBackend};
pub use circuit::{Angle, BitString, Circuit, GateKind, GateOp, Probability};
pub use error::{Result, SimError};
pub use optimize::optimize_circuit;
pub use qasm::{emit_qasm, parse_qasm};
pub use rng::RngStream;
pub use sampler::{
    candidates, sample_gate_by_gate, sample_qubit_by_qubit, sample_with_trajectories,
    MultiplicityMap, SampleResult,
};
