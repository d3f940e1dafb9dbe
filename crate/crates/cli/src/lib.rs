//! Library side of the `qsample` command: backend dispatch, circuit
//! sources, benchmark sweeps and the QAOA MaxCut demo.

pub mod bench;
pub mod qaoa;
pub mod source;

use std::fmt;
use std::path::PathBuf;

use qsample_core::{sample_gate_by_gate, ChForm, Circuit, DenseState, MpsState, SampleResult, SimError};
use thiserror::Error;

/// Dense simulation above this width is reported as infeasible.
pub const MAX_DENSE_QUBITS: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Statevector,
    Stabilizer,
    Mps,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Statevector => "statevector",
            Backend::Stabilizer => "stabilizer",
            Backend::Mps => "mps",
        })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write output: {0}")]
    Write(#[from] std::io::Error),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for backend/gate mismatches, 3 for bad input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Sim(SimError::UnsupportedOp { .. }) => 2,
            CliError::Sim(SimError::Parse { .. })
            | CliError::Sim(SimError::InvalidSpec(_))
            | CliError::Sim(SimError::UnsupportedExport(_))
            | CliError::Read { .. }
            | CliError::Usage(_) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Gate-by-gate sampling of `circuit` on the chosen backend.
pub fn run_sampler(
    circuit: &Circuit,
    backend: Backend,
    shots: u64,
    seed: u64,
    chi_max: Option<usize>,
) -> CliResult<SampleResult> {
    let result = match backend {
        Backend::Statevector => {
            if circuit.n_qubits() > MAX_DENSE_QUBITS {
                return Err(CliError::Usage(format!(
                    "statevector backend is limited to {MAX_DENSE_QUBITS} qubits"
                )));
            }
            sample_gate_by_gate(circuit, DenseState::new, shots, seed)?
        }
        Backend::Stabilizer => sample_gate_by_gate(circuit, ChForm::new, shots, seed)?,
        Backend::Mps => sample_gate_by_gate(circuit, |n| MpsState::new(n, chi_max), shots, seed)?,
    };
    Ok(result)
}

/// `bitstring,count` rows in bitstring order.
pub fn counts_csv(result: &SampleResult) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bitstring", "count"])?;
    for (b, c) in &result.counts {
        w.write_record([b.to_string(), c.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Write(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
