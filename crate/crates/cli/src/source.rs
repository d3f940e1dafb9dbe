//! Circuit sources shared by the subcommands: a QASM file or a generator.

use std::path::{Path, PathBuf};

use qsample_core::generate::{
    generate_clifford_t_circuit, generate_fixed_cnot_circuit, generate_ghz, generate_ghz_random_cnot,
    generate_random_circuit,
};
use qsample_core::{parse_qasm, Circuit, GateKind};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// H then a CNOT ladder.
    Ghz,
    /// GHZ with randomly sequenced CNOTs.
    GhzRandom,
    /// Random moments over H, S, T, Rx, Ry, Rz, CNOT, CZ.
    Random,
    /// Random moments over H, S, CNOT.
    Clifford,
    /// Random Clifford moments with `t_count` gates swapped for T.
    CliffordT,
    /// A fixed number of CNOTs among random single-qubit gates.
    FixedCnot,
}

/// Generator parameters; fields unused by a generator are ignored.
#[derive(Debug, Clone, PartialEq, clap::Args)]
pub struct GeneratorParams {
    #[arg(long, default_value_t = 4)]
    pub qubits: usize,
    /// Moments for layered generators.
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    #[arg(long, default_value_t = 0.3)]
    pub two_qubit_fraction: f64,
    #[arg(long, default_value_t = 4)]
    pub t_count: usize,
    #[arg(long, default_value_t = 8)]
    pub cnots: usize,
    /// Single-qubit gates for the fixed-cnot generator.
    #[arg(long, default_value_t = 40)]
    pub singles: usize,
    /// Seed for circuit generation (defaults to the sampling seed).
    #[arg(long)]
    pub circuit_seed: Option<u64>,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            qubits: 4,
            depth: 10,
            two_qubit_fraction: 0.3,
            t_count: 4,
            cnots: 8,
            singles: 40,
            circuit_seed: None,
        }
    }
}

pub fn random_gate_set() -> Vec<GateKind> {
    vec![
        GateKind::H,
        GateKind::S,
        GateKind::T,
        GateKind::rx(0.0),
        GateKind::ry(0.0),
        GateKind::rz(0.0),
        GateKind::Cnot,
        GateKind::Cz,
    ]
}

pub fn clifford_gate_set() -> Vec<GateKind> {
    vec![GateKind::H, GateKind::S, GateKind::Cnot]
}

pub fn generate(generator: Generator, p: &GeneratorParams, seed: u64) -> CliResult<Circuit> {
    let seed = p.circuit_seed.unwrap_or(seed);
    let circuit = match generator {
        Generator::Ghz => generate_ghz(p.qubits)?,
        Generator::GhzRandom => generate_ghz_random_cnot(p.qubits, seed)?,
        Generator::Random => {
            generate_random_circuit(p.qubits, p.depth, &random_gate_set(), p.two_qubit_fraction, seed)?
        }
        Generator::Clifford => {
            generate_random_circuit(p.qubits, p.depth, &clifford_gate_set(), p.two_qubit_fraction, seed)?
        }
        Generator::CliffordT => {
            generate_clifford_t_circuit(p.qubits, p.depth, p.t_count, p.two_qubit_fraction, seed)?
        }
        Generator::FixedCnot => generate_fixed_cnot_circuit(p.qubits, p.cnots, p.singles, seed)?,
    };
    Ok(circuit)
}

pub fn read_qasm(path: &Path) -> CliResult<Circuit> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: PathBuf::from(path),
        source,
    })?;
    Ok(parse_qasm(&text)?)
}

/// Resolves `--qasm` or `--generator`; exactly one must be given.
pub fn load(
    qasm: Option<&Path>,
    generator: Option<Generator>,
    params: &GeneratorParams,
    seed: u64,
) -> CliResult<Circuit> {
    match (qasm, generator) {
        (Some(path), None) => read_qasm(path),
        (None, Some(g)) => generate(g, params, seed),
        _ => Err(CliError::Usage("give exactly one of --qasm or --generator".into())),
    }
}
