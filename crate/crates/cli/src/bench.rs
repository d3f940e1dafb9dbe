//! Runtime sweeps written as CSV rows.

use std::io::Write;

use qsample_core::{optimize_circuit, sample_qubit_by_qubit};
use serde::{Serialize, Serializer};

use crate::source::{generate, Generator, GeneratorParams};
use crate::{run_sampler, Backend, CliError, CliResult, MAX_DENSE_QUBITS};

pub const CSV_HEADER: &str = "backend,sampler,n_qubits,depth,shots,seconds,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    GateByGate,
    QubitByQubit,
}

impl SamplerKind {
    pub fn label(self) -> &'static str {
        match self {
            SamplerKind::GateByGate => "gate-by-gate",
            SamplerKind::QubitByQubit => "qubit-by-qubit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Axis {
    Depth,
    Width,
    Shots,
    CnotCount,
}

/// One timed configuration. `seconds` is `None` for skipped
/// configurations and is written as `skipped`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub backend: String,
    pub sampler: String,
    pub n_qubits: usize,
    pub depth: usize,
    pub shots: u64,
    #[serde(serialize_with = "seconds_or_skipped")]
    pub seconds: Option<f64>,
    pub seed: u64,
}

fn seconds_or_skipped<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(t) => s.serialize_f64(*t),
        None => s.serialize_str("skipped"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<u64>,
    pub family: Generator,
    pub params: GeneratorParams,
    pub backend: Backend,
    pub sampler: SamplerKind,
    pub shots: u64,
    pub trials: u64,
    pub seed: u64,
    pub chi_max: Option<usize>,
    pub optimize: bool,
}

fn layered(family: Generator) -> bool {
    matches!(family, Generator::Random | Generator::Clifford | Generator::CliffordT)
}

/// Runs one configuration. Circuit construction is not timed.
pub fn run_point(spec: &SweepSpec, value: u64, trial: u64) -> CliResult<BenchRecord> {
    let mut params = spec.params.clone();
    let mut shots = spec.shots;
    let value_usize = usize::try_from(value).map_err(|_| CliError::Usage("sweep value too large".into()))?;
    match spec.axis {
        Axis::Depth => params.depth = value_usize,
        Axis::Width => params.qubits = value_usize,
        Axis::Shots => shots = value,
        Axis::CnotCount => params.cnots = value_usize,
    }
    let seed = spec.seed.wrapping_add(trial);
    params.circuit_seed = Some(seed);
    let mut circuit = generate(spec.family, &params, seed)?;
    if spec.optimize {
        circuit = optimize_circuit(&circuit);
    }
    let depth = if layered(spec.family) { params.depth } else { circuit.len() };
    let dense = spec.backend == Backend::Statevector || spec.sampler == SamplerKind::QubitByQubit;
    let mut record = BenchRecord {
        backend: spec.backend.to_string(),
        sampler: spec.sampler.label().to_string(),
        n_qubits: circuit.n_qubits(),
        depth,
        shots,
        seconds: None,
        seed,
    };
    if dense && circuit.n_qubits() > MAX_DENSE_QUBITS {
        return Ok(record);
    }
    let result = match spec.sampler {
        SamplerKind::GateByGate => run_sampler(&circuit, spec.backend, shots, seed, spec.chi_max)?,
        SamplerKind::QubitByQubit => sample_qubit_by_qubit(&circuit, shots, seed)?,
    };
    record.seconds = Some(result.runtime_s);
    Ok(record)
}

/// Every `(value, trial)` pair in sweep order.
pub fn run_sweep(spec: &SweepSpec) -> CliResult<Vec<BenchRecord>> {
    if spec.sampler == SamplerKind::QubitByQubit && spec.backend != Backend::Statevector {
        return Err(CliError::Usage("qubit-by-qubit sampling needs the statevector backend".into()));
    }
    let mut rows = Vec::with_capacity(spec.values.len() * spec.trials as usize);
    for &value in &spec.values {
        for trial in 0..spec.trials {
            rows.push(run_point(spec, value, trial)?);
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[BenchRecord], out: W) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `a,b,c` or `start:end[:step]` (inclusive end).
pub fn parse_values(text: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("cannot parse sweep values `{text}`");
    if text.contains(':') {
        let parts: Vec<u64> = text
            .split(':')
            .map(|p| p.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (*a, *b, 1),
            [a, b, s] => (*a, *b, *s),
            _ => return Err(bad()),
        };
        if step == 0 || start > end {
            return Err(bad());
        }
        Ok((start..=end).step_by(step as usize).collect())
    } else {
        text.split(',').map(|p| p.trim().parse::<u64>().map_err(|_| bad())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(axis: Axis, values: Vec<u64>) -> SweepSpec {
        SweepSpec {
            axis,
            values,
            family: Generator::Random,
            params: GeneratorParams { qubits: 3, depth: 4, ..GeneratorParams::default() },
            backend: Backend::Statevector,
            sampler: SamplerKind::GateByGate,
            shots: 100,
            trials: 2,
            seed: 5,
            chi_max: None,
            optimize: false,
        }
    }

    #[test]
    fn value_parsing() {
        assert_eq!(parse_values("1,2,5").unwrap(), [1, 2, 5]);
        assert_eq!(parse_values("2:6:2").unwrap(), [2, 4, 6]);
        assert_eq!(parse_values("3:5").unwrap(), [3, 4, 5]);
        assert!(parse_values("5:3").is_err());
        assert!(parse_values("a,b").is_err());
        assert!(parse_values("1:2:0").is_err());
    }

    #[test]
    fn sweep_rows_follow_axis() {
        let rows = run_sweep(&spec(Axis::Depth, vec![2, 6])).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows.iter().map(|r| r.depth).collect::<Vec<_>>(), [2, 2, 6, 6]);
        assert_eq!(rows.iter().map(|r| r.seed).collect::<Vec<_>>(), [5, 6, 5, 6]);
        let rows = run_sweep(&spec(Axis::Shots, vec![10, 1000])).unwrap();
        assert_eq!(rows[2].shots, 1000);
        let rows = run_sweep(&spec(Axis::Width, vec![2, 4])).unwrap();
        assert_eq!(rows[3].n_qubits, 4);
        assert!(rows.iter().all(|r| r.seconds.unwrap() >= 0.0));
    }

    #[test]
    fn oversized_dense_runs_are_skipped() {
        let mut s = spec(Axis::Width, vec![27]);
        s.trials = 1;
        let rows = run_sweep(&s).unwrap();
        assert_eq!(rows[0].seconds, None);
        let mut out = Vec::new();
        write_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, format!("{CSV_HEADER}\nstatevector,gate-by-gate,27,4,100,skipped,5\n"));
    }

    #[test]
    fn qubit_by_qubit_needs_statevector() {
        let mut s = spec(Axis::Depth, vec![2]);
        s.sampler = SamplerKind::QubitByQubit;
        assert!(run_sweep(&s).is_ok());
        s.backend = Backend::Mps;
        assert!(matches!(run_sweep(&s), Err(CliError::Usage(_))));
    }
}
